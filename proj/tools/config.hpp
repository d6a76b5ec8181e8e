#pragma once

#include <map>
#include <string>
#include <vector>

#include "ionbath/experiments.hpp"

namespace ionbath::cli {

// Flat sectioned key-value configuration. Every key has a default; unknown keys are rejected.
//
//   [chain]
//   n_ions = 50
//   # comment
//   spacing = paul-trap
class Config {
 public:
  Config();

  void load_file(const std::string& path);
  void load_text(const std::string& text, const std::string& origin = "<text>");
  // "section.key=value"
  void apply_override(const std::string& assignment);
  void set(const std::string& key, const std::string& value);

  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;
  long get_long(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_list(const std::string& key) const;

  // Resolved configuration, one "key = value" per entry in key order.
  std::vector<std::string> lines() const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

ChainKind chain_kind(const Config& c);
ChainSpec chain_spec(const Config& c);
NNSpec nn_spec(const Config& c);
InitialStateSpec initial_spec(const Config& c);
DecouplingOptions decoupling_options(const Config& c);
Scenario scenario(const Config& c);
Parity parse_parity(const std::string& s);

}  // namespace ionbath::cli
