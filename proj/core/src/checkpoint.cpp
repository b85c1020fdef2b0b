#include "hgcf/checkpoint.hpp"

#include <sstream>

#include "hgcf/error.hpp"
#include "text_format.hpp"

namespace hgcf {

namespace {

constexpr const char* kMagic = "hgcf-checkpoint 1";

void write_matrix(std::string& out, const std::string& name, const Matrix& m) {
  out += "matrix " + name + " " + std::to_string(m.rows()) + " " + std::to_string(m.cols()) + "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ' ';
      out += detail::format_double(m(i, j));
    }
    out += '\n';
  }
}

class LineReader {
 public:
  LineReader(std::string text, std::string source) : in_(std::move(text)), source_(std::move(source)) {}

  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  }

  std::string require() {
    std::string line;
    if (!next(line)) fail("unexpected end of file");
    return line;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, line_no_, what); }
  const std::string& source() const { return source_; }

 private:
  std::istringstream in_;
  std::string source_;
  std::size_t line_no_ = 0;
};

Matrix read_matrix(LineReader& reader, const std::string& header, std::string& name) {
  auto f = detail::split_whitespace(header);
  if (f.size() != 4 || f[0] != "matrix") reader.fail("expected 'matrix <name> <rows> <cols>'");
  name = std::string(f[1]);
  const auto rows = detail::parse_integer(f[2], reader.source());
  const auto cols = detail::parse_integer(f[3], reader.source());
  if (rows < 0 || cols < 0) reader.fail("negative matrix shape");
  Matrix m(rows, cols);
  for (long long i = 0; i < rows; ++i) {
    const std::string line = reader.require();
    auto values = detail::split_whitespace(line);
    if (static_cast<long long>(values.size()) != cols) reader.fail("wrong number of values in matrix row");
    for (long long j = 0; j < cols; ++j) m(i, j) = detail::parse_double(values[static_cast<std::size_t>(j)], reader.source());
  }
  return m;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  std::string out = std::string(kMagic) + "\n";
  const auto& c = ckpt.config;
  out += "config.dim=" + std::to_string(c.dim) + "\n";
  out += "config.layers=" + std::to_string(c.layers) + "\n";
  out += "config.leaky_slope=" + detail::format_double(c.leaky_slope) + "\n";
  out += "config.message_dropout=" + detail::format_double(c.message_dropout) + "\n";
  out += "config.include_layer0=" + std::string(c.include_layer0 ? "1" : "0") + "\n";
  for (const auto& [k, v] : ckpt.metadata) {
    if (k.find_first_of("=\n") != std::string::npos || v.find('\n') != std::string::npos)
      throw InputError("checkpoint metadata may not contain newlines or '=' in keys");
    out += "meta." + k + "=" + v + "\n";
  }
  write_matrix(out, "embeddings", ckpt.params.embeddings);
  for (std::size_t l = 0; l < ckpt.params.w1.size(); ++l) {
    write_matrix(out, "w1." + std::to_string(l + 1), ckpt.params.w1[l]);
    write_matrix(out, "w2." + std::to_string(l + 1), ckpt.params.w2[l]);
  }
  out += "end\n";
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  detail::write_file(path, out);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw InputError("checkpoint not found: " + path.string());
  LineReader reader(detail::read_file(path), path.string());
  if (reader.require() != kMagic) reader.fail("not an hgcf checkpoint");

  Checkpoint ckpt;
  std::map<std::string, std::string> config;
  std::string line = reader.require();
  while (line.rfind("matrix ", 0) != 0) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) reader.fail("expected key=value");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key.rfind("config.", 0) == 0)
      config[key.substr(7)] = value;
    else if (key.rfind("meta.", 0) == 0)
      ckpt.metadata[key.substr(5)] = value;
    else
      reader.fail("unknown header key '" + key + "'");
    line = reader.require();
  }
  const std::string src = path.string();
  ckpt.config.dim = static_cast<Index>(detail::parse_integer(detail::require_key(config, "dim", src), src));
  ckpt.config.layers = static_cast<int>(detail::parse_integer(detail::require_key(config, "layers", src), src));
  ckpt.config.leaky_slope = detail::parse_double(detail::require_key(config, "leaky_slope", src), src);
  ckpt.config.message_dropout = detail::parse_double(detail::require_key(config, "message_dropout", src), src);
  ckpt.config.include_layer0 = detail::require_key(config, "include_layer0", src) == "1";
  validate(ckpt.config);

  std::string name;
  ckpt.params.embeddings = read_matrix(reader, line, name);
  if (name != "embeddings") reader.fail("expected the embeddings matrix first");
  for (int l = 1; l <= ckpt.config.layers; ++l) {
    ckpt.params.w1.push_back(read_matrix(reader, reader.require(), name));
    if (name != "w1." + std::to_string(l)) reader.fail("expected w1." + std::to_string(l));
    ckpt.params.w2.push_back(read_matrix(reader, reader.require(), name));
    if (name != "w2." + std::to_string(l)) reader.fail("expected w2." + std::to_string(l));
  }
  if (reader.require() != "end") reader.fail("expected 'end'");
  if (ckpt.params.embeddings.cols() != ckpt.config.dim) reader.fail("embedding width does not match config.dim");
  return ckpt;
}

}  // namespace hgcf
