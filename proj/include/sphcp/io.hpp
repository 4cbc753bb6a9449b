#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace sphcp {

/// "SFLD1" field file: one ASCII header line
///   SFLD1 K=<K> T=<nt> layout=theta-major dtype=f64le
/// followed by nt * 2K^2 little-endian doubles. Columns of `data` are the
/// per-time fields.
void write_sfld(const std::string& path, int K, const Eigen::MatrixXd& data);
Eigen::MatrixXd read_sfld(const std::string& path, int* K_out);

/// "SCOF1" coefficient file: header
///   SCOF1 L=<L> T=<nt> dtype=f64le
/// followed by nt * (L+1)^2 doubles in the canonical l*l+l+m ordering.
void write_scof(const std::string& path, int L, const Eigen::MatrixXd& data);
Eigen::MatrixXd read_scof(const std::string& path, int* L_out);

/// int16 changepoint sample archive: header
///   STAU1 N=<N> S=<n_samples> M=<M_time> dtype=i16le
void write_tau_archive(const std::string& path, int M_time,
                       const Eigen::MatrixXi& samples);  // N x S
Eigen::MatrixXi read_tau_archive(const std::string& path, int* M_time_out);

/// Flat ASCII key=value configuration. '#' starts a comment; blank lines are
/// ignored. Every key must be consumed by the reader before finish(), and
/// unknown keys are errors.
class ConfigReader {
 public:
  explicit ConfigReader(const std::string& path);
  static ConfigReader from_string(const std::string& text);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key);
  std::string get_string(const std::string& key, const std::string& fallback);
  double get_double(const std::string& key);
  double get_double(const std::string& key, double fallback);
  long get_int(const std::string& key);
  long get_int(const std::string& key, long fallback);
  bool get_bool(const std::string& key, bool fallback);

  /// Throws config_error listing any unconsumed keys.
  void finish() const;

 private:
  ConfigReader() = default;
  void parse(const std::string& text);
  std::map<std::string, std::string> kv_;
  std::set<std::string> used_;
};

/// Minimal CSV writer: quotes nothing, joins with commas.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace sphcp
