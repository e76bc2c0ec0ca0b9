#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "coalgene/gene_process.hpp"
#include "coalgene/spectrum.hpp"

namespace coalgene {

/// Malformed input file; `line` is 1-based, 0 when no line applies.
struct ParseError : std::runtime_error {
  ParseError(std::size_t line_number, const std::string& message)
      : std::runtime_error(line_number > 0
                               ? "line " + std::to_string(line_number) + ": " + message
                               : message),
        line(line_number) {}
  std::size_t line;
};

/// Presence/absence matrix CSV. Header "gene_id,<name_1>,...,<name_n>"
/// defines n; one row per gene with cells 0/1; '#' starts a comment line;
/// gene ids must be unique and every gene needs at least one carrier.
/// An empty matrix (header only) is valid.
PresenceMatrix read_matrix_csv(std::istream& in);
PresenceMatrix read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(std::ostream& out, const PresenceMatrix& matrix,
                      const std::vector<std::string>& comments = {});
void write_matrix_csv(const std::filesystem::path& path, const PresenceMatrix& matrix,
                      const std::vector<std::string>& comments = {});

/// Spectrum TSV: rows "k<TAB>count" for contiguous k = 1..n; an optional
/// "k\tcount" header and '#' comments are accepted.
SpectrumCounts read_spectrum_tsv(std::istream& in);
SpectrumCounts read_spectrum_tsv(const std::filesystem::path& path);
void write_spectrum_tsv(std::ostream& out, const SpectrumCounts& spectrum);
void write_spectrum_tsv(const std::filesystem::path& path, const SpectrumCounts& spectrum);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace coalgene
