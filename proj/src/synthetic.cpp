#include "reqfuse/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "reqfuse/random.hpp"
#include "reqfuse/textrep.hpp"

namespace reqfuse {
namespace {

using Words = std::vector<std::string>;

// Each entry lists interchangeable phrasings; the first is the base form.
using Slot = std::vector<std::vector<Words>>;

const Slot& actors() {
  static const Slot s = {
      {{"system"}, {"platform"}},
      {{"application"}, {"app"}, {"software"}},
      {{"server"}, {"backend"}, {"host"}},
      {{"user", "interface"}, {"front", "end"}, {"ui"}},
      {{"mobile", "client"}, {"phone", "app"}},
      {{"scheduler"}, {"job", "planner"}},
      {{"gateway"}, {"proxy"}},
      {{"monitoring", "service"}, {"watchdog"}, {"health", "monitor"}},
  };
  return s;
}

const Slot& modals() {
  static const Slot s = {{{"shall"}, {"must"}, {"is", "required", "to"}}, {{"should"}, {"ought", "to"}}};
  return s;
}

const Slot& verbs() {
  static const Slot s = {
      {{"store"}, {"save"}, {"persist"}, {"keep"}},
      {{"display"}, {"show"}, {"present"}, {"render"}},
      {{"send"}, {"transmit"}, {"dispatch"}, {"deliver"}},
      {{"delete"}, {"remove"}, {"erase"}, {"purge"}},
      {{"verify"}, {"validate"}, {"check"}, {"confirm"}},
      {{"encrypt"}, {"encode"}, {"protect"}},
      {{"log"}, {"record"}, {"track"}},
      {{"update"}, {"modify"}, {"change"}, {"refresh"}},
      {{"export"}, {"download"}, {"extract"}},
      {{"archive"}, {"back", "up"}, {"preserve"}},
  };
  return s;
}

const Slot& objects() {
  static const Slot s = {
      {{"customer", "data"}, {"client", "information"}, {"customer", "records"}},
      {{"monthly", "report"}, {"monthly", "summary"}, {"month", "end", "statement"}},
      {{"error", "message"}, {"failure", "notice"}, {"fault", "alert"}},
      {{"password"}, {"credential"}, {"passphrase"}},
      {{"uploaded", "file"}, {"uploaded", "document"}, {"attachment"}},
      {{"payment", "request"}, {"billing", "query"}, {"charge", "request"}},
      {{"purchase", "order"}, {"sales", "transaction"}, {"order"}},
      {{"account", "settings"}, {"profile", "preferences"}, {"user", "options"}},
      {{"audit", "trail"}, {"activity", "history"}, {"access", "log"}},
      {{"sensor", "readings"}, {"telemetry"}, {"measurement", "values"}},
  };
  return s;
}

const Slot& qualifiers() {
  static const Slot s = {
      {{"within", "five", "seconds"}, {"in", "under", "five", "seconds"}},
      {{"after", "each", "login"}, {"following", "every", "sign", "in"}},
      {{"every", "night"}, {"nightly"}, {"each", "evening"}},
      {{"for", "all", "users"}, {"for", "every", "user"}},
      {{"before", "shutdown"}, {"prior", "to", "shutdown"}},
      {{"on", "demand"}, {"upon", "request"}},
      {{"in", "real", "time"}, {"immediately"}, {"instantly"}},
      {{"securely"}, {"in", "a", "secure", "manner"}},
  };
  return s;
}

const Slot& events() {
  static const Slot s = {
      {{"a", "session", "expires"}, {"a", "session", "times", "out"}},
      {{"the", "disk", "is", "full"}, {"storage", "runs", "out"}},
      {{"a", "payment", "fails"}, {"a", "charge", "is", "declined"}},
      {{"the", "user", "logs", "out"}, {"the", "user", "signs", "out"}},
      {{"an", "error", "occurs"}, {"a", "fault", "happens"}},
      {{"the", "network", "is", "unavailable"}, {"connectivity", "is", "lost"}},
  };
  return s;
}

// Sentence shapes. Neutral pairs always combine two different shapes.
constexpr std::size_t kTemplates = 4;

struct Sentence {
  std::size_t shape, actor, modal, verb, object, qualifier, event;
};

Sentence random_sentence(Rng& rng) {
  Sentence s{};
  s.shape = rng.below(kTemplates);
  s.actor = rng.below(actors().size());
  s.modal = rng.below(modals().size());
  s.verb = rng.below(verbs().size());
  s.object = rng.below(objects().size());
  s.qualifier = rng.below(qualifiers().size());
  s.event = rng.below(events().size());
  return s;
}

void append(Words& out, const Slot& slot, std::size_t entry, std::size_t variant) {
  const auto& words = slot[entry][variant];
  out.insert(out.end(), words.begin(), words.end());
}

// Variant 0 everywhere gives the base sentence; a rewrite picks a synonym
// with probability `rate` for each slot.
Words words_of(const Sentence& s, Rng* rng, double rate) {
  auto pick = [&](const Slot& slot, std::size_t entry) -> std::size_t {
    const std::size_t n = slot[entry].size();
    if (rng == nullptr || n == 1 || rng->uniform() >= rate) return 0;
    return 1 + rng->below(n - 1);
  };
  Words w;
  auto add = [&](const Slot& slot, std::size_t entry) { append(w, slot, entry, pick(slot, entry)); };
  switch (s.shape) {
    case 0:  // The <actor> <modal> <verb> the <object> <qualifier>.
      w.push_back("the");
      add(actors(), s.actor);
      add(modals(), s.modal);
      add(verbs(), s.verb);
      w.push_back("the");
      add(objects(), s.object);
      add(qualifiers(), s.qualifier);
      break;
    case 1:  // When <event>, the <actor> <modal> <verb> the <object>.
      w.push_back("when");
      add(events(), s.event);
      w.push_back("the");
      add(actors(), s.actor);
      add(modals(), s.modal);
      add(verbs(), s.verb);
      w.push_back("the");
      add(objects(), s.object);
      break;
    case 2:  // Operators <modal> be able to <verb> the <object> <qualifier>.
      w.push_back("operators");
      add(modals(), s.modal);
      w.insert(w.end(), {"be", "able", "to"});
      add(verbs(), s.verb);
      w.push_back("the");
      add(objects(), s.object);
      add(qualifiers(), s.qualifier);
      break;
    default:  // If <event>, an alert <modal> reach the <actor> <qualifier>.
      w.push_back("if");
      add(events(), s.event);
      w.insert(w.end(), {"an", "alert"});
      add(modals(), s.modal);
      w.insert(w.end(), {"reach", "the"});
      add(actors(), s.actor);
      add(qualifiers(), s.qualifier);
      break;
  }
  return w;
}

std::string render(const Words& words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0) out += ' ';
    out += words[i];
  }
  if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out + ".";
}

std::string numbered(char prefix, std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%04zu", prefix, n);
  return buf;
}

}  // namespace

double token_overlap(std::string_view a, std::string_view b) {
  const TokenList ta = tokenize(a);
  const TokenList tb = tokenize(b);
  const std::set<std::string> sa(ta.begin(), ta.end());
  const std::set<std::string> sb(tb.begin(), tb.end());
  std::size_t shared = 0;
  for (const auto& t : sa) shared += sb.count(t);
  const std::size_t total = sa.size() + sb.size() - shared;
  return total == 0 ? 1.0 : static_cast<double>(shared) / static_cast<double>(total);
}

SyntheticCorpus make_synthetic(const SyntheticOptions& o) {
  Rng rng(o.seed);
  const auto n_dup = static_cast<std::size_t>(std::llround(o.duplicate_fraction * static_cast<double>(o.pairs)));
  std::vector<PairLabel> labels(o.pairs, PairLabel::Neutral);
  std::fill_n(labels.begin(), std::min(n_dup, o.pairs), PairLabel::Duplicate);
  rng.shuffle(std::span(labels));

  std::vector<RequirementPair> pairs;
  for (std::size_t i = 0; i < o.pairs; ++i) {
    RequirementPair p;
    p.pair_id = numbered('P', i + 1);
    p.left.id = numbered('R', 2 * i + 1);
    p.right.id = numbered('R', 2 * i + 2);
    p.label = labels[i];
    const Sentence base = random_sentence(rng);
    p.left.text = render(words_of(base, nullptr, 0.0));
    if (p.label == PairLabel::Duplicate) {
      Words rewrite = words_of(base, &rng, o.substitution_rate);
      rng.shuffle(std::span(rewrite));
      p.right.text = render(rewrite);
    } else {
      Sentence other = random_sentence(rng);
      while (other.shape == base.shape) other.shape = rng.below(kTemplates);
      while (other.verb == base.verb) other.verb = rng.below(verbs().size());
      while (other.object == base.object) other.object = rng.below(objects().size());
      while (other.actor == base.actor) other.actor = rng.below(actors().size());
      p.right.text = render(words_of(other, nullptr, 0.0));
    }
    pairs.push_back(std::move(p));
  }

  // Per-model response curves and CLS directions.
  struct Curve {
    double floor, gain, power;
  };
  std::vector<Curve> curves;
  for (std::size_t m = 0; m < kSimModels.size(); ++m) {
    Rng mr(derive_seed(o.seed, 100 + m));
    curves.push_back({mr.uniform(0.05, 0.25), mr.uniform(0.6, 0.9), mr.uniform(0.6, 1.4)});
  }
  std::vector<std::vector<double>> directions;
  for (std::size_t m = 0; m < kClsModels.size(); ++m) {
    Rng mr(derive_seed(o.seed, 200 + m));
    std::vector<double> d(o.cls_dim);
    double norm = 0.0;
    for (double& v : d) {
      v = mr.normal();
      norm += v * v;
    }
    for (double& v : d) v /= std::sqrt(norm);
    directions.push_back(std::move(d));
  }

  EmbeddingStore store;
  Rng noise(derive_seed(o.seed, 300));
  for (const auto& p : pairs) {
    const double overlap = token_overlap(p.left.text, p.right.text);
    for (std::size_t m = 0; m < kSimModels.size(); ++m) {
      const auto& c = curves[m];
      const double s = c.floor + c.gain * std::pow(overlap, c.power) + noise.normal(0.0, o.score_noise);
      store.add({p.pair_id, kSimModels[m], RecordKind::Sim, {std::clamp(s, 0.0, 1.0)}, ""});
    }
    for (std::size_t m = 0; m < kClsModels.size(); ++m) {
      std::vector<double> v(o.cls_dim);
      for (std::size_t j = 0; j < o.cls_dim; ++j)
        v[j] = 3.0 * (overlap - 0.5) * directions[m][j] + noise.normal(0.0, o.cls_noise);
      store.add({p.pair_id, kClsModels[m], RecordKind::Cls, std::move(v), ""});
    }
  }
  return {PairDataset("synthetic", std::move(pairs)), std::move(store)};
}

}  // namespace reqfuse
