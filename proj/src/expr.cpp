#include "pafnet/expr.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>

#include "pafnet/special.hpp"

namespace pafnet::ad {

const char* op_name(Op op) {
  switch (op) {
    case Op::Constant: return "const";
    case Op::Variable: return "var";
    case Op::Add: return "add";
    case Op::Sub: return "sub";
    case Op::Mul: return "mul";
    case Op::Div: return "div";
    case Op::Neg: return "neg";
    case Op::PowInt: return "pow_int";
    case Op::Sqrt: return "sqrt";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Tanh: return "tanh";
    case Op::Erfc: return "erfc";
    case Op::Step: return "step";
  }
  return "?";
}

namespace {

double ipow(double x, int n) {
  if (n < 0) return 1.0 / ipow(x, -n);
  double r = 1.0;
  double b = x;
  while (n) {
    if (n & 1) r *= b;
    b *= b;
    n >>= 1;
  }
  return r;
}

// Shared by constant folding and Session::forward so folded constants are
// bit-identical with runtime evaluation.
double eval_unary(Op op, double x) {
  switch (op) {
    case Op::Neg: return -x;
    case Op::Sqrt:
      if (x < 0.0) throw DomainViolation("sqrt", x);
      return std::sqrt(x);
    case Op::Exp: return std::exp(x);
    case Op::Log:
      if (x <= 0.0) throw DomainViolation("log", x);
      return std::log(x);
    case Op::Sin: return std::sin(x);
    case Op::Cos: return std::cos(x);
    case Op::Tanh: return std::tanh(x);
    case Op::Erfc: return special::erfc(x);
    case Op::Step: return x >= 0.0 ? 1.0 : 0.0;
    default: throw Error("eval_unary: not a unary op");
  }
}

bool unary_foldable(Op op, double x) {
  if (op == Op::Sqrt && x < 0.0) return false;
  if (op == Op::Log && x <= 0.0) return false;
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// Binding

Binding::Binding(const Graph& g) { resize_for(g); }

void Binding::resize_for(const Graph& g) {
  values_.resize(g.num_vars(), 0.0);
  flags_.resize(g.num_vars(), 0);
}

void Binding::set(VarId v, double value) {
  if (v >= values_.size()) {
    values_.resize(v + 1, 0.0);
    flags_.resize(v + 1, 0);
  }
  values_[v] = value;
  flags_[v] = 1;
}

void Binding::clear(VarId v) {
  if (v < flags_.size()) flags_[v] = 0;
}

// ---------------------------------------------------------------------------
// Graph

std::size_t Graph::KeyHash::operator()(const Key& k) const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  mix(static_cast<std::uint64_t>(k.op));
  mix(static_cast<std::uint64_t>(static_cast<std::uint32_t>(k.a)));
  mix(static_cast<std::uint64_t>(static_cast<std::uint32_t>(k.b)));
  mix(k.payload_bits);
  return static_cast<std::size_t>(h);
}

Expr Graph::emplace(Op op, std::int32_t a, std::int32_t b, double payload) {
  Key key{op, a, b, std::bit_cast<std::uint64_t>(payload)};
  auto it = cse_.find(key);
  if (it != cse_.end()) return wrap(it->second);
  NodeId id = static_cast<NodeId>(op_.size());
  op_.push_back(op);
  a_.push_back(a);
  b_.push_back(b);
  payload_.push_back(payload);
  cse_.emplace(key, id);
  return wrap(id);
}

Expr Graph::constant(double v) { return emplace(Op::Constant, -1, -1, v); }

Expr Graph::variable(const std::string& name) {
  VarId v = static_cast<VarId>(var_names_.size());
  var_names_.push_back(name);
  // payload keeps constants and distinct variables from colliding in the CSE key
  Expr e = emplace(Op::Variable, static_cast<std::int32_t>(v), -1,
                   static_cast<double>(v));
  var_nodes_.push_back(e.id());
  return e;
}

VarId Graph::var_id(Expr e) const {
  if (op_[e.id()] != Op::Variable) throw Error("var_id: expression is not a variable");
  return static_cast<VarId>(a_[e.id()]);
}

bool Graph::is_const(Expr e, double v) const {
  return op_[e.id()] == Op::Constant && payload_[e.id()] == v;
}

Expr Graph::add(Expr a, Expr b) {
  if (is_const(a) && is_const(b)) return constant(cval(a) + cval(b));
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  if (a.id() > b.id()) std::swap(a, b);  // commutative: canonical order
  return emplace(Op::Add, static_cast<std::int32_t>(a.id()),
                 static_cast<std::int32_t>(b.id()), 0.0);
}

Expr Graph::sub(Expr a, Expr b) {
  if (is_const(a) && is_const(b)) return constant(cval(a) - cval(b));
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return neg(b);
  if (a.id() == b.id()) return constant(0.0);
  return emplace(Op::Sub, static_cast<std::int32_t>(a.id()),
                 static_cast<std::int32_t>(b.id()), 0.0);
}

Expr Graph::mul(Expr a, Expr b) {
  if (is_const(a) && is_const(b)) return constant(cval(a) * cval(b));
  if (is_const(a, 0.0) || is_const(b, 0.0)) return constant(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (is_const(a, -1.0)) return neg(b);
  if (is_const(b, -1.0)) return neg(a);
  if (a.id() > b.id()) std::swap(a, b);
  return emplace(Op::Mul, static_cast<std::int32_t>(a.id()),
                 static_cast<std::int32_t>(b.id()), 0.0);
}

Expr Graph::div(Expr a, Expr b) {
  if (is_const(a) && is_const(b) && cval(b) != 0.0) return constant(cval(a) / cval(b));
  if (is_const(b, 1.0)) return a;
  if (is_const(b, -1.0)) return neg(a);
  return emplace(Op::Div, static_cast<std::int32_t>(a.id()),
                 static_cast<std::int32_t>(b.id()), 0.0);
}

Expr Graph::neg(Expr a) {
  if (is_const(a)) return constant(-cval(a));
  if (op_[a.id()] == Op::Neg) return wrap(static_cast<NodeId>(a_[a.id()]));
  return emplace(Op::Neg, static_cast<std::int32_t>(a.id()), -1, 0.0);
}

Expr Graph::pow_int(Expr a, int exponent) {
  if (exponent == 0) return constant(1.0);
  if (exponent == 1) return a;
  if (is_const(a) && !(cval(a) == 0.0 && exponent < 0))
    return constant(ipow(cval(a), exponent));
  return emplace(Op::PowInt, static_cast<std::int32_t>(a.id()), exponent, 0.0);
}

#define PAFNET_UNARY_BUILDER(fn, OPK)                              \
  Expr Graph::fn(Expr a) {                                         \
    if (is_const(a) && unary_foldable(Op::OPK, cval(a)))           \
      return constant(eval_unary(Op::OPK, cval(a)));               \
    return emplace(Op::OPK, static_cast<std::int32_t>(a.id()), -1, 0.0); \
  }

PAFNET_UNARY_BUILDER(sqrt, Sqrt)
PAFNET_UNARY_BUILDER(exp, Exp)
PAFNET_UNARY_BUILDER(log, Log)
PAFNET_UNARY_BUILDER(sin, Sin)
PAFNET_UNARY_BUILDER(cos, Cos)
PAFNET_UNARY_BUILDER(tanh, Tanh)
PAFNET_UNARY_BUILDER(erfc, Erfc)
PAFNET_UNARY_BUILDER(step, Step)
#undef PAFNET_UNARY_BUILDER

namespace {

// reachable node ids, ascending (children precede parents by construction)
std::vector<NodeId> reachable(const Graph& g, std::span<const Expr> roots) {
  std::vector<char> seen(g.size(), 0);
  std::vector<NodeId> stack;
  for (const Expr& r : roots) {
    if (!seen[r.id()]) {
      seen[r.id()] = 1;
      stack.push_back(r.id());
    }
  }
  std::vector<NodeId> out;
  while (!stack.empty()) {
    NodeId n = stack.back();
    stack.pop_back();
    out.push_back(n);
    const Op o = g.op(n);
    if (o == Op::Constant || o == Op::Variable) continue;
    NodeId c0 = g.child0(n);
    if (!seen[c0]) {
      seen[c0] = 1;
      stack.push_back(c0);
    }
    if (o == Op::Add || o == Op::Sub || o == Op::Mul || o == Op::Div) {
      NodeId c1 = g.child1(n);
      if (!seen[c1]) {
        seen[c1] = 1;
        stack.push_back(c1);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

Expr Graph::derive(Expr f, Expr var) { return derive(f, var_id(var)); }

Expr Graph::derive(Expr f, VarId v) {
  auto key = [v](NodeId n) {
    return (static_cast<std::uint64_t>(n) << 32) | static_cast<std::uint64_t>(v);
  };
  const std::vector<NodeId> order = reachable(*this, std::span<const Expr>(&f, 1));
  for (NodeId n : order) {
    if (deriv_memo_.count(key(n))) continue;
    const Op o = op_[n];
    Expr d;
    switch (o) {
      case Op::Constant:
        d = constant(0.0);
        break;
      case Op::Variable:
        d = constant(static_cast<VarId>(a_[n]) == v ? 1.0 : 0.0);
        break;
      default: {
        Expr x = wrap(static_cast<NodeId>(a_[n]));
        Expr dx = wrap(deriv_memo_.at(key(x.id())));
        switch (o) {
          case Op::Add: {
            Expr y = wrap(static_cast<NodeId>(b_[n]));
            Expr dy = wrap(deriv_memo_.at(key(y.id())));
            d = add(dx, dy);
            break;
          }
          case Op::Sub: {
            Expr y = wrap(static_cast<NodeId>(b_[n]));
            Expr dy = wrap(deriv_memo_.at(key(y.id())));
            d = sub(dx, dy);
            break;
          }
          case Op::Mul: {
            Expr y = wrap(static_cast<NodeId>(b_[n]));
            Expr dy = wrap(deriv_memo_.at(key(y.id())));
            d = add(mul(dx, y), mul(x, dy));
            break;
          }
          case Op::Div: {
            // d(x/y) = (dx - (x/y) dy) / y, reusing this node's quotient
            Expr y = wrap(static_cast<NodeId>(b_[n]));
            Expr dy = wrap(deriv_memo_.at(key(y.id())));
            d = div(sub(dx, mul(wrap(n), dy)), y);
            break;
          }
          case Op::Neg:
            d = neg(dx);
            break;
          case Op::PowInt: {
            int e = b_[n];
            d = mul(mul(constant(static_cast<double>(e)), pow_int(x, e - 1)), dx);
            break;
          }
          case Op::Sqrt:
            d = div(dx, mul(constant(2.0), wrap(n)));
            break;
          case Op::Exp:
            d = mul(wrap(n), dx);
            break;
          case Op::Log:
            d = div(dx, x);
            break;
          case Op::Sin:
            d = mul(cos(x), dx);
            break;
          case Op::Cos:
            d = neg(mul(sin(x), dx));
            break;
          case Op::Tanh:
            d = mul(sub(constant(1.0), mul(wrap(n), wrap(n))), dx);
            break;
          case Op::Erfc:
            d = mul(mul(constant(-special::two_over_sqrt_pi),
                        exp(neg(mul(x, x)))),
                    dx);
            break;
          case Op::Step:
            d = constant(0.0);
            break;
          default:
            throw UnsupportedOp(op_name(o));
        }
      }
    }
    deriv_memo_.emplace(key(n), d.id());
  }
  return wrap(deriv_memo_.at(key(f.id())));
}

Expr Graph::substitute(Expr root, const std::vector<std::pair<VarId, double>>& subs) {
  std::unordered_map<VarId, double> map(subs.begin(), subs.end());
  const std::vector<NodeId> order = reachable(*this, std::span<const Expr>(&root, 1));
  std::unordered_map<NodeId, NodeId> image;
  image.reserve(order.size());
  for (NodeId n : order) {
    const Op o = op_[n];
    Expr r;
    switch (o) {
      case Op::Constant:
        r = wrap(n);
        break;
      case Op::Variable: {
        auto it = map.find(static_cast<VarId>(a_[n]));
        r = (it == map.end()) ? wrap(n) : constant(it->second);
        break;
      }
      case Op::PowInt:
        r = pow_int(wrap(image.at(static_cast<NodeId>(a_[n]))), b_[n]);
        break;
      case Op::Add:
      case Op::Sub:
      case Op::Mul:
      case Op::Div: {
        Expr x = wrap(image.at(static_cast<NodeId>(a_[n])));
        Expr y = wrap(image.at(static_cast<NodeId>(b_[n])));
        switch (o) {
          case Op::Add: r = add(x, y); break;
          case Op::Sub: r = sub(x, y); break;
          case Op::Mul: r = mul(x, y); break;
          default: r = div(x, y); break;
        }
        break;
      }
      default: {
        Expr x = wrap(image.at(static_cast<NodeId>(a_[n])));
        switch (o) {
          case Op::Neg: r = neg(x); break;
          case Op::Sqrt: r = sqrt(x); break;
          case Op::Exp: r = exp(x); break;
          case Op::Log: r = log(x); break;
          case Op::Sin: r = sin(x); break;
          case Op::Cos: r = cos(x); break;
          case Op::Tanh: r = tanh(x); break;
          case Op::Erfc: r = erfc(x); break;
          case Op::Step: r = step(x); break;
          default: throw UnsupportedOp(op_name(o));
        }
      }
    }
    image.emplace(n, r.id());
  }
  return wrap(image.at(root.id()));
}

void Graph::dump(std::ostream& os, Expr root) const {
  char buf[64];
  for (NodeId n : reachable(*this, std::span<const Expr>(&root, 1))) {
    const Op o = op_[n];
    os << n << ' ' << op_name(o);
    switch (o) {
      case Op::Constant:
        std::snprintf(buf, sizeof buf, "%.17g", payload_[n]);
        os << ' ' << buf;
        break;
      case Op::Variable:
        os << ' ' << var_names_[static_cast<VarId>(a_[n])];
        break;
      case Op::PowInt:
        os << ' ' << a_[n] << ' ' << b_[n];
        break;
      case Op::Add:
      case Op::Sub:
      case Op::Mul:
      case Op::Div:
        os << ' ' << a_[n] << ' ' << b_[n];
        break;
      default:
        os << ' ' << a_[n];
    }
    os << '\n';
  }
}

// ---------------------------------------------------------------------------
// Session

Session::Session(const Graph& g, std::span<const Expr> roots) : g_(&g) {
  for (const Expr& r : roots)
    if (r.graph_ptr() != &g) throw Error("session root from a different graph");
  plan_ = reachable(g, roots);
  pos_.assign(g.size(), -1);
  for (std::size_t i = 0; i < plan_.size(); ++i)
    pos_[plan_[i]] = static_cast<std::int32_t>(i);
  val_.resize(plan_.size());
  adj_.resize(plan_.size());
}

void Session::forward(const Binding& b) {
  const Graph& g = *g_;
  for (std::size_t i = 0; i < plan_.size(); ++i) {
    const NodeId n = plan_[i];
    double v;
    switch (g.op_[n]) {
      case Op::Constant:
        v = g.payload_[n];
        break;
      case Op::Variable: {
        const VarId var = static_cast<VarId>(g.a_[n]);
        if (!b.bound(var)) throw UnboundVariable(g.var_names_[var]);
        v = b.get(var);
        break;
      }
      case Op::Add:
        v = val_[pos_[g.a_[n]]] + val_[pos_[g.b_[n]]];
        break;
      case Op::Sub:
        v = val_[pos_[g.a_[n]]] - val_[pos_[g.b_[n]]];
        break;
      case Op::Mul:
        v = val_[pos_[g.a_[n]]] * val_[pos_[g.b_[n]]];
        break;
      case Op::Div: {
        const double den = val_[pos_[g.b_[n]]];
        if (den == 0.0) throw DomainViolation("div", den);
        v = val_[pos_[g.a_[n]]] / den;
        break;
      }
      case Op::PowInt: {
        const double x = val_[pos_[g.a_[n]]];
        const int e = g.b_[n];
        if (x == 0.0 && e < 0) throw DomainViolation("pow_int", x);
        v = ipow(x, e);
        break;
      }
      default:
        v = eval_unary(g.op_[n], val_[pos_[g.a_[n]]]);
    }
    val_[i] = v;
  }
}

double Session::value(Expr e) const {
  if (e.graph_ptr() != g_ || pos_[e.id()] < 0)
    throw Error("expression is not part of this session");
  return val_[pos_[e.id()]];
}

void Session::backward(Expr root, std::span<const VarId> wrt,
                       std::span<double> out) const {
  const Graph& g = *g_;
  if (pos_[root.id()] < 0) throw Error("root is not part of this session");
  std::fill(adj_.begin(), adj_.end(), 0.0);
  adj_[pos_[root.id()]] = 1.0;

  for (std::size_t i = plan_.size(); i-- > 0;) {
    const double w = adj_[i];
    if (w == 0.0) continue;
    const NodeId n = plan_[i];
    switch (g.op_[n]) {
      case Op::Constant:
      case Op::Variable:
      case Op::Step:
        break;
      case Op::Add:
        adj_[pos_[g.a_[n]]] += w;
        adj_[pos_[g.b_[n]]] += w;
        break;
      case Op::Sub:
        adj_[pos_[g.a_[n]]] += w;
        adj_[pos_[g.b_[n]]] -= w;
        break;
      case Op::Mul:
        adj_[pos_[g.a_[n]]] += w * val_[pos_[g.b_[n]]];
        adj_[pos_[g.b_[n]]] += w * val_[pos_[g.a_[n]]];
        break;
      case Op::Div: {
        const double den = val_[pos_[g.b_[n]]];
        adj_[pos_[g.a_[n]]] += w / den;
        adj_[pos_[g.b_[n]]] -= w * val_[i] / den;
        break;
      }
      case Op::Neg:
        adj_[pos_[g.a_[n]]] -= w;
        break;
      case Op::PowInt: {
        const int e = g.b_[n];
        const double x = val_[pos_[g.a_[n]]];
        adj_[pos_[g.a_[n]]] += w * static_cast<double>(e) * ipow(x, e - 1);
        break;
      }
      case Op::Sqrt:
        adj_[pos_[g.a_[n]]] += w / (2.0 * val_[i]);
        break;
      case Op::Exp:
        adj_[pos_[g.a_[n]]] += w * val_[i];
        break;
      case Op::Log:
        adj_[pos_[g.a_[n]]] += w / val_[pos_[g.a_[n]]];
        break;
      case Op::Sin:
        adj_[pos_[g.a_[n]]] += w * std::cos(val_[pos_[g.a_[n]]]);
        break;
      case Op::Cos:
        adj_[pos_[g.a_[n]]] -= w * std::sin(val_[pos_[g.a_[n]]]);
        break;
      case Op::Tanh:
        adj_[pos_[g.a_[n]]] += w * (1.0 - val_[i] * val_[i]);
        break;
      case Op::Erfc: {
        const double x = val_[pos_[g.a_[n]]];
        adj_[pos_[g.a_[n]]] += w * (-special::two_over_sqrt_pi * std::exp(-x * x));
        break;
      }
    }
  }

  for (std::size_t k = 0; k < wrt.size(); ++k) {
    const NodeId node = g.var_nodes_[wrt[k]];
    const std::int32_t p = node < pos_.size() ? pos_[node] : -1;
    out[k] = (p >= 0) ? adj_[p] : 0.0;
  }
}

// ---------------------------------------------------------------------------

double evaluate(Expr e, const Binding& b) {
  Session s(e.graph(), e);
  s.forward(b);
  return s.value(e);
}

std::vector<double> gradient(Expr e, std::span<const VarId> vars, const Binding& b) {
  Session s(e.graph(), e);
  s.forward(b);
  std::vector<double> out(vars.size());
  s.backward(e, vars, out);
  return out;
}

}  // namespace pafnet::ad
