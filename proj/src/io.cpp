#include "sphcp/io.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>

#include "sphcp/errors.hpp"

namespace sphcp {

namespace {

void write_header_and_payload(const std::string& path, const std::string& header,
                              const char* payload, std::size_t bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for writing: " + path);
  out << header << "\n";
  out.write(payload, static_cast<std::streamsize>(bytes));
  if (!out) throw io_error("write failed: " + path);
}

// reads the header line and returns its whitespace-separated tokens
std::vector<std::string> read_header(std::ifstream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) throw io_error("cannot read header: " + path);
  std::vector<std::string> tokens;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) tokens.push_back(tok);
  return tokens;
}

long header_field(const std::vector<std::string>& tokens, const std::string& key,
                  const std::string& path) {
  for (const auto& t : tokens) {
    if (t.rfind(key + "=", 0) == 0) return std::stol(t.substr(key.size() + 1));
  }
  throw io_error("missing header field " + key + " in " + path);
}

}  // namespace

void write_sfld(const std::string& path, int K, const Eigen::MatrixXd& data) {
  if (data.rows() != static_cast<Eigen::Index>(2) * K * K) {
    throw io_error("write_sfld: field size does not match K");
  }
  std::ostringstream h;
  h << "SFLD1 K=" << K << " T=" << data.cols() << " layout=theta-major dtype=f64le";
  write_header_and_payload(path, h.str(),
                           reinterpret_cast<const char*>(data.data()),
                           sizeof(double) * static_cast<std::size_t>(data.size()));
}

Eigen::MatrixXd read_sfld(const std::string& path, int* K_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open: " + path);
  auto tokens = read_header(in, path);
  if (tokens.empty() || tokens[0] != "SFLD1") {
    throw io_error("not an SFLD1 file: " + path);
  }
  const long K = header_field(tokens, "K", path);
  const long T = header_field(tokens, "T", path);
  Eigen::MatrixXd data(2 * K * K, T);
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(sizeof(double) * data.size()));
  if (!in) throw io_error("truncated SFLD1 payload: " + path);
  if (K_out) *K_out = static_cast<int>(K);
  return data;
}

void write_scof(const std::string& path, int L, const Eigen::MatrixXd& data) {
  if (data.rows() != static_cast<Eigen::Index>(L + 1) * (L + 1)) {
    throw io_error("write_scof: coefficient size does not match L");
  }
  std::ostringstream h;
  h << "SCOF1 L=" << L << " T=" << data.cols() << " dtype=f64le";
  write_header_and_payload(path, h.str(),
                           reinterpret_cast<const char*>(data.data()),
                           sizeof(double) * static_cast<std::size_t>(data.size()));
}

Eigen::MatrixXd read_scof(const std::string& path, int* L_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open: " + path);
  auto tokens = read_header(in, path);
  if (tokens.empty() || tokens[0] != "SCOF1") {
    throw io_error("not an SCOF1 file: " + path);
  }
  const long L = header_field(tokens, "L", path);
  const long T = header_field(tokens, "T", path);
  Eigen::MatrixXd data((L + 1) * (L + 1), T);
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(sizeof(double) * data.size()));
  if (!in) throw io_error("truncated SCOF1 payload: " + path);
  if (L_out) *L_out = static_cast<int>(L);
  return data;
}

void write_tau_archive(const std::string& path, int M_time,
                       const Eigen::MatrixXi& samples) {
  if (M_time > 65535) throw io_error("write_tau_archive: M_time exceeds int16 range");
  std::vector<std::int16_t> buf(static_cast<std::size_t>(samples.size()));
  for (Eigen::Index c = 0, k = 0; c < samples.cols(); ++c) {
    for (Eigen::Index r = 0; r < samples.rows(); ++r, ++k) {
      buf[static_cast<std::size_t>(k)] = static_cast<std::int16_t>(samples(r, c));
    }
  }
  std::ostringstream h;
  h << "STAU1 N=" << samples.rows() << " S=" << samples.cols() << " M=" << M_time
    << " dtype=i16le";
  write_header_and_payload(path, h.str(), reinterpret_cast<const char*>(buf.data()),
                           sizeof(std::int16_t) * buf.size());
}

Eigen::MatrixXi read_tau_archive(const std::string& path, int* M_time_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open: " + path);
  auto tokens = read_header(in, path);
  if (tokens.empty() || tokens[0] != "STAU1") {
    throw io_error("not an STAU1 file: " + path);
  }
  const long N = header_field(tokens, "N", path);
  const long S = header_field(tokens, "S", path);
  const long M = header_field(tokens, "M", path);
  std::vector<std::int16_t> buf(static_cast<std::size_t>(N) * S);
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(sizeof(std::int16_t) * buf.size()));
  if (!in) throw io_error("truncated STAU1 payload: " + path);
  Eigen::MatrixXi samples(N, S);
  for (long c = 0, k = 0; c < S; ++c) {
    for (long r = 0; r < N; ++r, ++k) samples(r, c) = buf[static_cast<std::size_t>(k)];
  }
  if (M_time_out) *M_time_out = static_cast<int>(M);
  return samples;
}

ConfigReader::ConfigReader(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  parse(ss.str());
}

ConfigReader ConfigReader::from_string(const std::string& text) {
  ConfigReader r;
  r.parse(text);
  return r;
}

void ConfigReader::parse(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw config_error("config line " + std::to_string(lineno) + ": expected key=value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return (b == std::string::npos) ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw config_error("config line " + std::to_string(lineno) + ": empty key");
    if (kv_.count(key)) throw config_error("config: duplicate key " + key);
    kv_[key] = val;
  }
}

bool ConfigReader::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string ConfigReader::get_string(const std::string& key) {
  auto it = kv_.find(key);
  if (it == kv_.end()) throw config_error("config: missing required key " + key);
  used_.insert(key);
  return it->second;
}

std::string ConfigReader::get_string(const std::string& key, const std::string& fallback) {
  if (!has(key)) return fallback;
  return get_string(key);
}

double ConfigReader::get_double(const std::string& key) {
  const std::string s = get_string(key);
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw config_error("config: key " + key + " is not a number: " + s);
  }
}

double ConfigReader::get_double(const std::string& key, double fallback) {
  if (!has(key)) return fallback;
  return get_double(key);
}

long ConfigReader::get_int(const std::string& key) {
  const std::string s = get_string(key);
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw config_error("config: key " + key + " is not an integer: " + s);
  }
}

long ConfigReader::get_int(const std::string& key, long fallback) {
  if (!has(key)) return fallback;
  return get_int(key);
}

bool ConfigReader::get_bool(const std::string& key, bool fallback) {
  if (!has(key)) return fallback;
  const std::string s = get_string(key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw config_error("config: key " + key + " is not a boolean: " + s);
}

void ConfigReader::finish() const {
  std::string unknown;
  for (const auto& [k, v] : kv_) {
    if (!used_.count(k)) unknown += (unknown.empty() ? "" : ", ") + k;
  }
  if (!unknown.empty()) throw config_error("config: unknown keys: " + unknown);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path);
  for (std::size_t i = 0; i < header.size(); ++i) {
    out << header[i] << (i + 1 < header.size() ? "," : "\n");
  }
  out.precision(12);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << row[i] << (i + 1 < row.size() ? "," : "\n");
    }
  }
  if (!out) throw io_error("write failed: " + path);
}

}  // namespace sphcp
