#include "lfuzz/interpreter.h"

#include <type_traits>

namespace lfuzz {

std::string_view CheckedErrorName(CheckedErrorKind kind) {
  switch (kind) {
    case CheckedErrorKind::kOverflow: return "overflow";
    case CheckedErrorKind::kDivByZero: return "division-by-zero";
    case CheckedErrorKind::kOutOfBounds: return "out-of-bounds";
  }
  return "?";
}

namespace {

struct Trap {
  OutcomeKind kind;
  SiteId site = 0;
  CheckedErrorKind error = CheckedErrorKind::kOverflow;
};

enum class Flow { kNext, kReturn, kTrap };

class Machine {
 public:
  Machine(const TargetProgram& prog, const ExecConfig& cfg, ExecutionResult& out)
      : prog_(prog), cfg_(cfg), out_(out) {
    word_mask_ = cfg.word.bits >= 64 ? ~uint64_t{0}
                                     : (uint64_t{1} << cfg.word.bits) - 1;
    for (const StorageDecl& decl : prog.storage) {
      if (decl.initial_value != 0) {
        out_.storage[decl.slot] = cfg_.word.wrap(decl.initial_value);
      }
    }
  }

  // Returns false once the fuel budget is gone; later calls are skipped.
  bool RunCall(const Call& call) {
    const FunctionDef& fn = prog_.functions[call.function];
    locals_.assign(fn.frame_size, 0);
    for (size_t i = 0; i < call.args.size(); ++i) {
      locals_[i] = cfg_.word.wrap(call.args[i]);
    }
    journal_.clear();
    trap_.reset();
    return_value_ = 0;
    const size_t first_write = out_.storage_writes.size();

    Flow flow = ExecBlock(fn.body);
    CallOutcome outcome;
    if (flow == Flow::kTrap) {
      outcome.kind = trap_->kind;
      outcome.site = trap_->site;
      outcome.error = trap_->error;
      Revert();
      for (size_t i = first_write; i < out_.storage_writes.size(); ++i) {
        out_.storage_writes[i].reverted = true;
      }
    } else {
      outcome.kind = OutcomeKind::kReturned;
      outcome.value = return_value_;
    }
    out_.outcomes.push_back(outcome);
    out_.trace.AddCallEnd(outcome.kind);
    return outcome.kind != OutcomeKind::kFuelExhausted;
  }

 private:
  bool Step() {
    if (++out_.steps > cfg_.fuel) {
      trap_ = Trap{OutcomeKind::kFuelExhausted};
      return false;
    }
    return true;
  }

  void Revert() {
    for (auto it = journal_.rbegin(); it != journal_.rend(); ++it) {
      if (it->second) {
        out_.storage[it->first] = *it->second;
      } else {
        out_.storage.erase(it->first);
      }
    }
    journal_.clear();
  }

  int64_t Read(uint64_t addr) const {
    auto it = out_.storage.find(addr);
    return it == out_.storage.end() ? 0 : it->second;
  }

  uint64_t Unsigned(int64_t v) const { return static_cast<uint64_t>(v) & word_mask_; }

  int64_t Arith(__int128 exact, SiteId site) {
    if (cfg_.checked_arithmetic && !cfg_.word.contains(exact)) {
      trap_ = Trap{OutcomeKind::kCheckedError, site, CheckedErrorKind::kOverflow};
      return 0;
    }
    return cfg_.word.wrap(exact);
  }

  int64_t Eval(const Expr& e) {
    return std::visit([this](const auto& n) -> int64_t { return EvalNode(n); }, e.node);
  }

  int64_t EvalNode(const expr::IntLit& n) { return cfg_.word.wrap(n.value); }
  int64_t EvalNode(const expr::Local& n) { return locals_[n.slot]; }
  int64_t EvalNode(const expr::Load& n) {
    int64_t addr = Eval(*n.addr);
    if (trap_) return 0;
    return Read(static_cast<uint64_t>(addr));
  }
  int64_t EvalNode(const expr::ElemAddr& n) {
    int64_t index = Eval(*n.index);
    if (trap_) return 0;
    if (n.checked && !(Unsigned(index) < Unsigned(Read(n.array_slot)))) {
      trap_ = Trap{OutcomeKind::kCheckedError, n.site, CheckedErrorKind::kOutOfBounds};
      return 0;
    }
    // Addresses wrap modulo 2^64 and are not word values.
    return static_cast<int64_t>(ArrayBase(n.array_slot) + Unsigned(index));
  }
  int64_t EvalNode(const expr::Binary& n) {
    int64_t l = Eval(*n.lhs);
    if (trap_) return 0;
    int64_t r = Eval(*n.rhs);
    if (trap_) return 0;
    const __int128 a = l, b = r;
    switch (n.op) {
      case BinOp::kAdd: return Arith(a + b, n.site);
      case BinOp::kSub: return Arith(a - b, n.site);
      case BinOp::kMul: return Arith(a * b, n.site);
      case BinOp::kDiv:
      case BinOp::kMod:
        if (r == 0) {
          trap_ = Trap{OutcomeKind::kCheckedError, n.site, CheckedErrorKind::kDivByZero};
          return 0;
        }
        return Arith(n.op == BinOp::kDiv ? a / b : a % b, n.site);
    }
    return 0;
  }
  int64_t EvalNode(const expr::Negate& n) {
    int64_t v = Eval(*n.operand);
    if (trap_) return 0;
    return Arith(-static_cast<__int128>(v), n.site);
  }
  int64_t EvalNode(const expr::Hash& n) {
    int64_t v = Eval(*n.operand);
    if (trap_) return 0;
    return cfg_.word.wrap(static_cast<int64_t>(Scramble(static_cast<uint64_t>(v))));
  }

  // Evaluates a condition, recording both flip costs and the decision.
  std::optional<bool> Condition(const CmpExpr& c, SiteId site) {
    int64_t l = Eval(c.lhs);
    if (trap_) return std::nullopt;
    int64_t r = Eval(c.rhs);
    if (trap_) return std::nullopt;
    BranchCostPair costs = BranchCosts(c.op, l, r);
    out_.costs.Record({site, CostDirection::kToFalse}, costs.to_false);
    out_.costs.Record({site, CostDirection::kToTrue}, costs.to_true);
    bool taken = EvalCmp(c.op, l, r);
    out_.trace.AddBranch(site, taken);
    return taken;
  }

  Flow ExecBlock(const Block& block) {
    for (const Stmt& s : block) {
      if (!Step()) return Flow::kTrap;
      Flow flow = std::visit([this](const auto& n) { return ExecNode(n); }, s.node);
      if (flow != Flow::kNext) return flow;
    }
    return Flow::kNext;
  }

  Flow ExecNode(const stmt::Let& n) {
    int64_t v = Eval(n.value);
    if (trap_) return Flow::kTrap;
    locals_[n.slot] = v;
    return Flow::kNext;
  }
  Flow ExecNode(const stmt::AssignLocal& n) {
    int64_t v = Eval(n.value);
    if (trap_) return Flow::kTrap;
    locals_[n.slot] = v;
    return Flow::kNext;
  }
  Flow ExecNode(const stmt::StoreStorage& n) {
    int64_t addr_value = Eval(n.addr);
    if (trap_) return Flow::kTrap;
    int64_t value = Eval(n.value);
    if (trap_) return Flow::kTrap;
    const uint64_t addr = static_cast<uint64_t>(addr_value);
    if (cfg_.probe_address) {
      out_.costs.Record({n.site, CostDirection::kWrite},
                        StorageCost(addr, *cfg_.probe_address));
    }
    out_.storage_writes.push_back({addr, value, n.site, false});
    auto it = out_.storage.find(addr);
    journal_.emplace_back(addr, it == out_.storage.end()
                                    ? std::nullopt
                                    : std::optional<int64_t>(it->second));
    out_.storage[addr] = value;
    return Flow::kNext;
  }
  Flow ExecNode(const stmt::If& n) {
    auto taken = Condition(n.cond, n.site);
    if (!taken) return Flow::kTrap;
    return ExecBlock(*taken ? n.then_block : n.else_block);
  }
  Flow ExecNode(const stmt::While& n) {
    while (true) {
      auto taken = Condition(n.cond, n.site);
      if (!taken) return Flow::kTrap;
      if (!*taken) return Flow::kNext;
      Flow flow = ExecBlock(n.body);
      if (flow != Flow::kNext) return flow;
      if (!Step()) return Flow::kTrap;
    }
  }
  Flow ExecNode(const stmt::Require& n) {
    auto holds = Condition(n.cond, n.site);
    if (!holds) return Flow::kTrap;
    if (!*holds) {
      trap_ = Trap{OutcomeKind::kRequireFailed, n.site};
      return Flow::kTrap;
    }
    return Flow::kNext;
  }
  Flow ExecNode(const stmt::Assert& n) {
    auto holds = Condition(n.cond, n.site);
    if (!holds) return Flow::kTrap;
    if (!*holds) {
      trap_ = Trap{OutcomeKind::kAssertFailed, n.site};
      return Flow::kTrap;
    }
    return Flow::kNext;
  }
  Flow ExecNode(const stmt::Return& n) {
    int64_t v = Eval(n.value);
    if (trap_) return Flow::kTrap;
    return_value_ = v;
    return Flow::kReturn;
  }

  const TargetProgram& prog_;
  const ExecConfig& cfg_;
  ExecutionResult& out_;
  uint64_t word_mask_;
  std::vector<int64_t> locals_;
  std::vector<std::pair<uint64_t, std::optional<int64_t>>> journal_;
  std::optional<Trap> trap_;
  int64_t return_value_ = 0;
};

}  // namespace

ExecutionResult Execute(const TargetProgram& prog, const InputVector& input,
                        const ExecConfig& cfg) {
  ValidateInput(prog, input);
  ExecutionResult result;
  Machine machine(prog, cfg, result);
  for (const Call& call : input.calls) {
    if (!machine.RunCall(call)) break;
  }
  return result;
}

}  // namespace lfuzz
