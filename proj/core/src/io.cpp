#include "coalgene/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace coalgene {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError(0, "cannot open " + path.string());
  }
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw ParseError(0, "cannot write " + path.string());
  }
  return out;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

bool skippable(const std::string& line) {
  return line.empty() || line[0] == '#';
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

std::uint64_t parse_count(const std::string& field, std::size_t line_no) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ParseError(line_no, "expected a nonnegative integer, got '" + field + "'");
  }
  return value;
}

}  // namespace

PresenceMatrix read_matrix_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;

  // Header.
  int n = -1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (skippable(line)) continue;
    const auto fields = split(line, ',');
    if (fields.size() < 2 || fields[0] != "gene_id") {
      throw ParseError(line_no, "expected header 'gene_id,<name_1>,...,<name_n>'");
    }
    n = static_cast<int>(fields.size()) - 1;
    break;
  }
  if (n < 1) {
    throw ParseError(line_no, "missing matrix header");
  }

  PresenceMatrix matrix(n);
  std::unordered_set<std::string> seen_ids;
  std::vector<std::uint64_t> mask(matrix.words_per_gene());
  std::uint64_t next_numeric_id = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (skippable(line)) continue;
    const auto fields = split(line, ',');
    if (static_cast<int>(fields.size()) != n + 1) {
      throw ParseError(line_no, "expected " + std::to_string(n + 1) + " columns, got " +
                                    std::to_string(fields.size()));
    }
    if (fields[0].empty()) {
      throw ParseError(line_no, "empty gene_id");
    }
    if (!seen_ids.insert(fields[0]).second) {
      throw ParseError(line_no, "duplicate gene_id '" + fields[0] + "'");
    }
    std::fill(mask.begin(), mask.end(), 0);
    bool any = false;
    for (int i = 0; i < n; ++i) {
      const std::string& cell = fields[static_cast<std::size_t>(i) + 1];
      if (cell == "1") {
        mask[static_cast<std::size_t>(i) / 64] |= std::uint64_t{1}
                                                  << (static_cast<std::size_t>(i) % 64);
        any = true;
      } else if (cell != "0") {
        throw ParseError(line_no, "cell values must be 0 or 1, got '" + cell + "'");
      }
    }
    if (!any) {
      throw ParseError(line_no,
                       "gene '" + fields[0] + "' has no carriers; such rows are pruned "
                       "from valid matrices");
    }
    matrix.add_gene(next_numeric_id++, GeneOrigin::kExternal, mask);
  }
  return matrix;
}

PresenceMatrix read_matrix_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return read_matrix_csv(in);
  } catch (const ParseError& e) {
    throw ParseError(e.line, path.string() + ": " + e.what());
  }
}

void write_matrix_csv(std::ostream& out, const PresenceMatrix& matrix,
                      const std::vector<std::string>& comments) {
  for (const auto& comment : comments) {
    out << "# " << comment << '\n';
  }
  out << "gene_id";
  for (int i = 0; i < matrix.sample_size(); ++i) out << ",s" << i;
  out << '\n';
  for (std::size_t g = 0; g < matrix.gene_count(); ++g) {
    out << 'g' << matrix.gene_id(g);
    for (int i = 0; i < matrix.sample_size(); ++i) {
      out << ',' << (matrix.carried(g, i) ? '1' : '0');
    }
    out << '\n';
  }
}

void write_matrix_csv(const std::filesystem::path& path, const PresenceMatrix& matrix,
                      const std::vector<std::string>& comments) {
  auto out = open_output(path);
  write_matrix_csv(out, matrix, comments);
}

SpectrumCounts read_spectrum_tsv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::uint64_t> counts;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (skippable(line)) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 2) {
      throw ParseError(line_no, "expected 'k<TAB>count'");
    }
    if (!saw_header && counts.empty() && fields[0] == "k") {
      saw_header = true;
      continue;
    }
    const std::uint64_t k = parse_count(fields[0], line_no);
    if (k != counts.size() + 1) {
      throw ParseError(line_no, "classes must be contiguous from 1; expected k=" +
                                    std::to_string(counts.size() + 1));
    }
    counts.push_back(parse_count(fields[1], line_no));
  }
  if (counts.empty()) {
    throw ParseError(line_no, "empty spectrum");
  }
  SpectrumCounts spectrum(static_cast<int>(counts.size()));
  spectrum.counts = std::move(counts);
  return spectrum;
}

SpectrumCounts read_spectrum_tsv(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return read_spectrum_tsv(in);
  } catch (const ParseError& e) {
    throw ParseError(e.line, path.string() + ": " + e.what());
  }
}

void write_spectrum_tsv(std::ostream& out, const SpectrumCounts& spectrum) {
  out << "k\tcount\n";
  for (int k = 1; k <= spectrum.sample_size; ++k) {
    out << k << '\t' << spectrum.counts[static_cast<std::size_t>(k) - 1] << '\n';
  }
}

void write_spectrum_tsv(const std::filesystem::path& path,
                        const SpectrumCounts& spectrum) {
  auto out = open_output(path);
  write_spectrum_tsv(out, spectrum);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  auto out = open_output(path);
  out << text;
}

}  // namespace coalgene
