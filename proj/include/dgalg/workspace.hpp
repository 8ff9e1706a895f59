#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dgalg/sqzero.hpp"

namespace dga {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// A declared object failed one of its invariants; the message names it.
class SemanticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::optional<int> order;
  std::optional<Window> window;
  std::optional<std::string> module, anchored, cdga;
  std::optional<unsigned long> seed;
};

struct WsCdga {
  std::string name;
  CdgaPtr A;
  int line = 0;
};
struct WsModule {
  std::string name, over;
  Bimodule M;
  int line = 0;
};
struct WsAnchored {
  std::string name, over;
  AnchoredModule V;
  int line = 0;
};
struct WsTask {
  std::string name, command;
  Options options;
  int line = 0;
};

struct Workspace {
  std::string label;
  std::vector<WsCdga> cdgas;
  std::vector<WsModule> modules;
  std::vector<WsAnchored> anchored;
  std::vector<WsTask> tasks;

  const WsCdga* find_cdga(const std::string& n) const;
  const WsModule* find_module(const std::string& n) const;
  const WsAnchored* find_anchored(const std::string& n) const;
};

// Line-oriented format, see README. Throws ParseError or SemanticError.
Workspace parse_workspace(const std::string& text, const std::string& label);
Workspace load_workspace(const std::string& path);

// "--order 3 --window -2 1 --module M ..." style flags
Options parse_flags(const std::vector<std::string>& args, int line);

}  // namespace dga
