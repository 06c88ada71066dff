#include "kummerlab/kummerlab.h"

#include <memory>
#include <new>
#include <string>

#include "run.hpp"
#include "splitting.hpp"

struct kl_session {
  kummerlab::cli::ContextCache cache;
  std::string error;
};

struct kl_result {
  int code = 0;
  std::string text;
};

struct kl_tower {
  kummerlab::tower::KummerTower tower;
};

namespace {

template <class F>
int guarded(kl_session* s, F&& body) {
  if (s) s->error.clear();
  try {
    return body();
  } catch (const std::bad_alloc&) {
    if (s) s->error = "out of memory";
    return KL_EINTERNAL;
  } catch (const std::invalid_argument& e) {
    if (s) s->error = e.what();
    return KL_EINVAL;
  } catch (const kummerlab::PreconditionError& e) {
    if (s) s->error = e.what();
    return KL_EINVAL;
  } catch (const kummerlab::InconclusiveError& e) {
    if (s) s->error = e.what();
    return KL_INCONCLUSIVE;
  } catch (const std::exception& e) {
    if (s) s->error = e.what();
    return KL_EINTERNAL;
  }
}

}  // namespace

extern "C" {

const char* kl_version(void) { return "0.1.0"; }

kl_session* kl_session_new(void) { return new (std::nothrow) kl_session(); }

void kl_session_free(kl_session* s) { delete s; }

int kl_set_threads(kl_session* s, unsigned threads) {
  if (!s) return KL_EINVAL;
  kummerlab::set_worker_threads(threads);
  return KL_OK;
}

const char* kl_last_error(const kl_session* s) { return s ? s->error.c_str() : "null session"; }

int kl_run(kl_session* s, const char* config_json, kl_result** out) {
  if (!s || !config_json || !out) return KL_EINVAL;
  *out = nullptr;
  return guarded(s, [&] {
    auto res = kummerlab::cli::run_json(config_json, &s->cache);
    s->error = res.error;
    auto r = std::make_unique<kl_result>();
    r->code = res.exit_code;
    r->text = std::move(res.output);
    *out = r.release();
    return (*out)->code;
  });
}

const char* kl_result_text(const kl_result* r) { return r ? r->text.c_str() : ""; }
size_t kl_result_size(const kl_result* r) { return r ? r->text.size() : 0; }
int kl_result_code(const kl_result* r) { return r ? r->code : KL_EINVAL; }
void kl_result_free(kl_result* r) { delete r; }

int kl_tower_new(kl_session* s, unsigned long m, const char* alpha, unsigned long p, unsigned r, kl_tower** out) {
  if (!out || !alpha) return KL_EINVAL;
  *out = nullptr;
  return guarded(s, [&] {
    namespace cy = kummerlab::cyclo;
    if (m == 0) throw std::invalid_argument("kl_tower_new: m must be positive");
    const auto field = cy::make_cyclo_field(cy::normalize_conductor(m));
    auto t = std::make_unique<kl_tower>(kl_tower{kummerlab::tower::build_nested_chain(cy::parse_element(field, alpha), p, r)});
    *out = t.release();
    return KL_OK;
  });
}

void kl_tower_free(kl_tower* t) { delete t; }

unsigned kl_tower_levels(const kl_tower* t) { return t ? t->tower.r : 0; }

int kl_tower_norms(kl_session* s, const kl_tower* t, unsigned long q, unsigned long long* norms, size_t cap,
                   size_t* count) {
  if (!t || !count || (cap && !norms)) return KL_EINVAL;
  return guarded(s, [&]() -> int {
    namespace sp = kummerlab::split;
    const auto R = t->tower.radical();
    for (const auto& v0 : sp::chain_bottom_traces(t->tower, q)) {
      if (kummerlab::tower::next_step_splits(v0, R)) continue;
      const auto res = sp::lemma44_check(t->tower, v0);
      *count = res.norms.size();
      for (size_t i = 0; i < res.norms.size() && i < cap; ++i) {
        if (!res.norms[i].fits_ulong_p()) throw std::invalid_argument("kl_tower_norms: norm exceeds 64 bits");
        norms[i] = res.norms[i].get_ui();
      }
      return KL_OK;
    }
    throw kummerlab::PreconditionError("kl_tower_norms: no prime above q is inert at the first step");
  });
}

}  // extern "C"
