#pragma once

// Key-tracking wrapper over toml++ tables, shared by the config loaders.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include <Eigen/Core>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "gasp/error.hpp"

namespace gasp::io::detail {

// Tracks consumed keys of one TOML table so leftovers can be reported.
class Reader {
 public:
  Reader(const toml::table& t, std::string path) : t_(t), path_(std::move(path)) {}

  std::string key_path(std::string_view k) const {
    return path_.empty() ? std::string(k) : path_ + "." + std::string(k);
  }

  const toml::node* node(std::string_view k) {
    const toml::node* n = t_.get(k);
    if (n) used_.insert(std::string(k));
    return n;
  }

  [[noreturn]] void type_error(std::string_view k, std::string_view expected) const {
    throw ConfigError(key_path(k) + ": expected " + std::string(expected));
  }

  std::optional<double> number(std::string_view k) {
    const toml::node* n = node(k);
    if (!n) return std::nullopt;
    if (auto v = n->value_exact<double>()) return *v;
    if (auto v = n->value_exact<std::int64_t>()) return static_cast<double>(*v);
    type_error(k, "a number");
  }

  std::optional<std::int64_t> integer(std::string_view k) {
    const toml::node* n = node(k);
    if (!n) return std::nullopt;
    if (auto v = n->value_exact<std::int64_t>()) return *v;
    type_error(k, "an integer");
  }

  std::optional<bool> boolean(std::string_view k) {
    const toml::node* n = node(k);
    if (!n) return std::nullopt;
    if (auto v = n->value_exact<bool>()) return *v;
    type_error(k, "a boolean");
  }

  std::optional<std::string> string(std::string_view k) {
    const toml::node* n = node(k);
    if (!n) return std::nullopt;
    if (auto v = n->value_exact<std::string>()) return *v;
    type_error(k, "a string");
  }

  template <int N>
  std::optional<Eigen::Matrix<double, N, 1>> vector(std::string_view k) {
    const toml::node* n = node(k);
    if (!n) return std::nullopt;
    const toml::array* a = n->as_array();
    const std::string expected = "an array of " + std::to_string(N) + " numbers";
    if (!a || a->size() != static_cast<std::size_t>(N)) type_error(k, expected);
    Eigen::Matrix<double, N, 1> out;
    for (int i = 0; i < N; ++i) {
      const toml::node& e = *a->get(static_cast<std::size_t>(i));
      if (auto v = e.value_exact<double>()) {
        out[i] = *v;
      } else if (auto iv = e.value_exact<std::int64_t>()) {
        out[i] = static_cast<double>(*iv);
      } else {
        type_error(k, expected);
      }
    }
    return out;
  }

  const toml::table* table(std::string_view k) {
    const toml::node* n = node(k);
    if (!n) return nullptr;
    if (const toml::table* t = n->as_table()) return t;
    type_error(k, "a table");
  }

  const toml::array* array(std::string_view k) {
    const toml::node* n = node(k);
    if (!n) return nullptr;
    if (const toml::array* a = n->as_array()) return a;
    type_error(k, "an array");
  }

  void finish() const {
    for (const auto& [k, v] : t_) {
      if (!used_.contains(std::string(k.str()))) {
        throw ConfigError("unknown key '" + key_path(k.str()) + "'");
      }
    }
  }

 private:
  const toml::table& t_;
  std::string path_;
  std::set<std::string> used_;
};


/// Parses a whole document, turning syntax errors into ConfigError.
inline toml::table parse_toml(std::string_view text, std::string_view source) {
  try {
    return toml::parse(text);
  } catch (const toml::parse_error& e) {
    throw ConfigError(std::string(source) + ": TOML syntax error at line " +
                      std::to_string(e.source().begin.line) + ", column " +
                      std::to_string(e.source().begin.column) + ": " + std::string(e.description()));
  }
}

}  // namespace gasp::io::detail
