#include "persuasion/io.hpp"

#include "persuasion/core.hpp"
#include "persuasion/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace persuasion {

namespace {

struct Line {
  int number = 0;
  std::vector<std::string> tokens;
};

[[noreturn]] void fail(const std::string& source, int line,
                       const std::string& message) {
  std::ostringstream os;
  os << source << ":" << line << ": " << message;
  throw std::invalid_argument(os.str());
}

double parse_number(const std::string& source, int line,
                    const std::string& token) {
  try {
    size_t used = 0;
    const double value = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return value;
  } catch (const std::exception&) {
    fail(source, line, "expected a number, got '" + token + "'");
  }
}

std::vector<Line> tokenize(const std::string& text) {
  std::vector<Line> lines;
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    Line line;
    line.number = number;
    std::string tok;
    while (ls >> tok) line.tokens.push_back(tok);
    if (!line.tokens.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

// Reads an M x N matrix from the following M lines.
Matrix read_matrix(const std::string& source, const std::vector<Line>& lines,
                   size_t& cursor, int rows, int cols, const char* what) {
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (cursor >= lines.size())
      fail(source, lines.back().number,
           std::string("unexpected end of file inside ") + what);
    const Line& line = lines[cursor++];
    if (static_cast<int>(line.tokens.size()) != cols)
      fail(source, line.number,
           std::string(what) + " row needs " + std::to_string(cols) +
               " entries, got " + std::to_string(line.tokens.size()));
    for (int c = 0; c < cols; ++c)
      m(r, c) = parse_number(source, line.number, line.tokens[c]);
  }
  return m;
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_matrix(std::ostringstream& os, const Matrix& m) {
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c)
      os << (c ? " " : "") << format_number(m(r, c));
    os << "\n";
  }
}

}  // namespace

LoadedInstance parse_instance_text(const std::string& text,
                                   const std::string& source,
                                   Tolerances tol) {
  const std::vector<Line> lines = tokenize(text);

  std::vector<std::string> states, actions;
  std::optional<Vector> prior;
  std::optional<Matrix> receiver_u, sender_v, box_lo, box_hi;
  std::optional<double> box_delta;
  int last_line = lines.empty() ? 1 : lines.back().number;

  size_t cursor = 0;
  while (cursor < lines.size()) {
    const Line& line = lines[cursor++];
    const std::string& key = line.tokens[0];
    const int m = static_cast<int>(actions.size());
    const int n = static_cast<int>(states.size());

    if (key == "states") {
      states.assign(line.tokens.begin() + 1, line.tokens.end());
      if (states.size() < 2) fail(source, line.number, "need at least 2 states");
    } else if (key == "actions") {
      actions.assign(line.tokens.begin() + 1, line.tokens.end());
      if (actions.empty()) fail(source, line.number, "need at least 1 action");
    } else if (key == "prior") {
      if (n == 0) fail(source, line.number, "'states' must come before 'prior'");
      if (static_cast<int>(line.tokens.size()) != n + 1)
        fail(source, line.number,
             "prior needs " + std::to_string(n) + " entries");
      Vector p(n);
      for (int j = 0; j < n; ++j)
        p[j] = parse_number(source, line.number, line.tokens[j + 1]);
      prior = std::move(p);
    } else if (key == "receiver_u" || key == "sender_v") {
      if (m == 0 || n == 0)
        fail(source, line.number,
             "'states' and 'actions' must come before matrices");
      Matrix mat = read_matrix(source, lines, cursor, m, n, key.c_str());
      (key == "receiver_u" ? receiver_u : sender_v) = std::move(mat);
    } else if (key == "box") {
      if (line.tokens.size() < 2)
        fail(source, line.number, "box needs a form: 'delta', 'lo' or 'hi'");
      const std::string& form = line.tokens[1];
      if (form == "delta") {
        if (line.tokens.size() != 3)
          fail(source, line.number, "usage: box delta <width>");
        box_delta = parse_number(source, line.number, line.tokens[2]);
      } else if (form == "lo" || form == "hi") {
        if (m == 0 || n == 0)
          fail(source, line.number,
               "'states' and 'actions' must come before box bounds");
        Matrix mat = read_matrix(source, lines, cursor, m, n, "box bound");
        (form == "lo" ? box_lo : box_hi) = std::move(mat);
      } else {
        fail(source, line.number, "unknown box form '" + form + "'");
      }
    } else {
      fail(source, line.number, "unknown field '" + key + "'");
    }
  }

  if (states.empty()) fail(source, last_line, "missing 'states'");
  if (actions.empty()) fail(source, last_line, "missing 'actions'");
  if (!prior) fail(source, last_line, "missing 'prior'");
  if (!receiver_u) fail(source, last_line, "missing 'receiver_u'");
  if (!sender_v) fail(source, last_line, "missing 'sender_v'");
  if (box_lo.has_value() != box_hi.has_value())
    fail(source, last_line, "box bounds need both 'box lo' and 'box hi'");
  if (box_delta && box_lo)
    fail(source, last_line, "give either 'box delta' or explicit bounds");

  LoadedInstance out;
  try {
    out.instance = PersuasionInstance::create(
        states, actions, Belief::checked(*prior, tol.sum),
        std::move(*receiver_u), std::move(*sender_v), tol);
    if (box_delta)
      out.box = UtilityBox::uniform_delta(out.instance, *box_delta);
    else if (box_lo)
      out.box = UtilityBox::from_bounds(out.instance, std::move(*box_lo),
                                        std::move(*box_hi));
  } catch (const std::invalid_argument& e) {
    fail(source, last_line, e.what());
  }
  return out;
}

LoadedInstance load_instance_file(const std::string& path, Tolerances tol) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open instance file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_instance_text(buffer.str(), path, tol);
}

std::string serialize_instance(const InstancePtr& instance,
                               const std::optional<UtilityBox>& box) {
  std::ostringstream os;
  os << "states";
  for (const auto& s : instance->state_labels()) os << " " << s;
  os << "\nactions";
  for (const auto& a : instance->action_labels()) os << " " << a;
  os << "\nprior";
  for (int j = 0; j < instance->num_states(); ++j)
    os << " " << format_number(instance->prior()[j]);
  os << "\nreceiver_u\n";
  write_matrix(os, instance->receiver_u());
  os << "sender_v\n";
  write_matrix(os, instance->sender_v());
  if (box) {
    os << "box lo\n";
    write_matrix(os, box->lo());
    os << "box hi\n";
    write_matrix(os, box->hi());
  }
  return os.str();
}

std::vector<CurveRow> emit_indirect_utility_curve(const InstancePtr& instance,
                                                  int resolution) {
  if (instance->num_states() != 2)
    throw std::domain_error(
        "indirect-utility curves are only defined for two-state instances");
  if (resolution < 2)
    throw std::invalid_argument("curve resolution must be at least 2");

  const ReceiverType ref = reference_type(instance);
  std::vector<double> grid;
  for (int i = 0; i < resolution; ++i)
    grid.push_back(static_cast<double>(i) / (resolution - 1));
  for (int a = 0; a < instance->num_actions(); ++a) {
    const RegionPolytope region = best_reply_region(ref, a);
    for (const auto& v : region.vertices()) grid.push_back(v[1]);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [](double a, double b) {
                           return std::abs(a - b) <= 1e-12;
                         }),
             grid.end());

  std::vector<CurveRow> rows;
  for (double p : grid) {
    Vector b(2);
    b << 1.0 - p, p;
    const IndirectValue iv = indirect_sender_value(ref, Belief::clamped(b));
    rows.push_back({p, iv.value, iv.chosen});
  }
  return rows;
}

}  // namespace persuasion
