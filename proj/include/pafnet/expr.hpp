#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pafnet/errors.hpp"

namespace pafnet::ad {

enum class Op : std::uint8_t {
  Constant,
  Variable,
  Add,
  Sub,
  Mul,
  Div,
  Neg,
  PowInt,
  Sqrt,
  Exp,
  Log,
  Sin,
  Cos,
  Tanh,
  Erfc,
  Step,  // right-continuous unit step; building block for relu
};

const char* op_name(Op op);

using NodeId = std::uint32_t;
using VarId = std::uint32_t;

class Graph;

/// Lightweight handle to one node of a Graph. Cheap to copy; valid for the
/// lifetime of the owning graph.
class Expr {
public:
  Expr() = default;
  Graph& graph() const { return *g_; }
  Graph* graph_ptr() const { return g_; }
  NodeId id() const { return id_; }
  bool valid() const { return g_ != nullptr; }

private:
  friend class Graph;
  Expr(Graph* g, NodeId id) : g_(g), id_(id) {}
  Graph* g_ = nullptr;
  NodeId id_ = 0;
};

/// Values for the variables of one graph. Evaluating a node whose variable
/// has no value set throws UnboundVariable.
class Binding {
public:
  Binding() = default;
  explicit Binding(const Graph& g);

  void set(VarId v, double value);
  void clear(VarId v);
  bool bound(VarId v) const { return v < flags_.size() && flags_[v]; }
  double get(VarId v) const { return values_[v]; }

  /// Grow to cover variables added to the graph after construction.
  void resize_for(const Graph& g);

private:
  std::vector<double> values_;
  std::vector<char> flags_;
};

/// Append-only expression arena with hash-consing. Children always precede
/// parents, so node ids are a topological order. One graph and its bindings
/// belong to a single thread; independent graphs are independent.
class Graph {
public:
  // Exprs hold a pointer back to their graph, so the graph must stay put.
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;
  Graph(Graph&&) = delete;
  Graph& operator=(Graph&&) = delete;

  // -- node construction (with constant folding and subexpression sharing) --
  Expr constant(double v);
  Expr variable(const std::string& name);
  Expr add(Expr a, Expr b);
  Expr sub(Expr a, Expr b);
  Expr mul(Expr a, Expr b);
  Expr div(Expr a, Expr b);
  Expr neg(Expr a);
  Expr pow_int(Expr a, int exponent);
  Expr sqrt(Expr a);
  Expr exp(Expr a);
  Expr log(Expr a);
  Expr sin(Expr a);
  Expr cos(Expr a);
  Expr tanh(Expr a);
  Expr erfc(Expr a);
  Expr step(Expr a);

  /// d(f)/d(v) as a new expression in this graph; itself differentiable.
  Expr derive(Expr f, VarId v);
  Expr derive(Expr f, Expr var);

  /// Rebuild `root` with the given variables replaced by constants
  /// (re-folding as it goes). Unlisted variables stay symbolic.
  Expr substitute(Expr root, const std::vector<std::pair<VarId, double>>& subs);

  // -- introspection --
  std::size_t size() const { return op_.size(); }
  Op op(NodeId n) const { return op_[n]; }
  NodeId child0(NodeId n) const { return static_cast<NodeId>(a_[n]); }
  NodeId child1(NodeId n) const { return static_cast<NodeId>(b_[n]); }
  double payload(NodeId n) const { return payload_[n]; }
  int exponent(NodeId n) const { return b_[n]; }

  std::size_t num_vars() const { return var_nodes_.size(); }
  const std::string& var_name(VarId v) const { return var_names_[v]; }
  Expr var_expr(VarId v) { return Expr(this, var_nodes_[v]); }
  VarId var_id(Expr e) const;

  /// Deterministic topologically sorted listing of the nodes reachable from
  /// `root` (one per line: id, op, children / payload).
  void dump(std::ostream& os, Expr root) const;

private:
  friend class Session;

  Expr emplace(Op op, std::int32_t a, std::int32_t b, double payload);
  Expr wrap(NodeId n) { return Expr(this, n); }
  bool is_const(Expr e, double v) const;
  bool is_const(Expr e) const { return op_[e.id()] == Op::Constant; }
  double cval(Expr e) const { return payload_[e.id()]; }

  struct Key {
    Op op;
    std::int32_t a;
    std::int32_t b;
    std::uint64_t payload_bits;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const;
  };

  std::vector<Op> op_;
  std::vector<std::int32_t> a_;
  std::vector<std::int32_t> b_;
  std::vector<double> payload_;
  std::unordered_map<Key, NodeId, KeyHash> cse_;
  std::unordered_map<std::uint64_t, NodeId> deriv_memo_;  // (node, var) -> node
  std::vector<std::string> var_names_;
  std::vector<NodeId> var_nodes_;
};

/// Reusable evaluation plan over the nodes reachable from a fixed set of
/// roots. forward() runs one sweep; value()/backward() read its results.
class Session {
public:
  Session(const Graph& g, std::span<const Expr> roots);
  Session(const Graph& g, Expr root) : Session(g, std::span<const Expr>(&root, 1)) {}

  void forward(const Binding& b);
  double value(Expr e) const;

  /// Reverse sweep seeded at `root` (adjoint 1); writes d root/d var into
  /// `out` for each var in `wrt`. Requires forward() first.
  void backward(Expr root, std::span<const VarId> wrt, std::span<double> out) const;

  std::size_t plan_size() const { return plan_.size(); }

private:
  const Graph* g_;
  std::vector<NodeId> plan_;     // ascending ids => topological
  std::vector<std::int32_t> pos_;  // node id -> plan index, -1 if absent
  std::vector<double> val_;
  mutable std::vector<double> adj_;
};

// -- one-shot entry points --------------------------------------------------
double evaluate(Expr e, const Binding& b);
std::vector<double> gradient(Expr e, std::span<const VarId> vars, const Binding& b);

// -- operator sugar -----------------------------------------------------------
inline Expr operator+(Expr a, Expr b) { return a.graph().add(a, b); }
inline Expr operator-(Expr a, Expr b) { return a.graph().sub(a, b); }
inline Expr operator*(Expr a, Expr b) { return a.graph().mul(a, b); }
inline Expr operator/(Expr a, Expr b) { return a.graph().div(a, b); }
inline Expr operator-(Expr a) { return a.graph().neg(a); }
inline Expr operator+(Expr a, double b) { return a + a.graph().constant(b); }
inline Expr operator+(double a, Expr b) { return b.graph().constant(a) + b; }
inline Expr operator-(Expr a, double b) { return a - a.graph().constant(b); }
inline Expr operator-(double a, Expr b) { return b.graph().constant(a) - b; }
inline Expr operator*(Expr a, double b) { return a * a.graph().constant(b); }
inline Expr operator*(double a, Expr b) { return b.graph().constant(a) * b; }
inline Expr operator/(Expr a, double b) { return a / a.graph().constant(b); }
inline Expr operator/(double a, Expr b) { return b.graph().constant(a) / b; }

inline Expr pow_int(Expr a, int n) { return a.graph().pow_int(a, n); }
inline Expr sqrt(Expr a) { return a.graph().sqrt(a); }
inline Expr exp(Expr a) { return a.graph().exp(a); }
inline Expr log(Expr a) { return a.graph().log(a); }
inline Expr sin(Expr a) { return a.graph().sin(a); }
inline Expr cos(Expr a) { return a.graph().cos(a); }
inline Expr tanh(Expr a) { return a.graph().tanh(a); }
inline Expr erfc(Expr a) { return a.graph().erfc(a); }
inline Expr step(Expr a) { return a.graph().step(a); }

}  // namespace pafnet::ad
