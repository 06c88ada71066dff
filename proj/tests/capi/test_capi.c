#include <stdio.h>
#include <string.h>

#include "kummerlab/kummerlab.h"

static int failures = 0;

#define CHECK(cond)                                              \
  do {                                                           \
    if (!(cond)) {                                               \
      fprintf(stderr, "%s:%d: CHECK(%s)\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                \
    }                                                            \
  } while (0)

int main(void) {
  kl_session* s = kl_session_new();
  CHECK(s != NULL);
  CHECK(strlen(kl_version()) > 0);
  CHECK(kl_set_threads(s, 2) == KL_OK);
  CHECK(kl_set_threads(NULL, 2) == KL_EINVAL);

  /* norms over q = 3 of the chain 1+i over Q(i) */
  kl_tower* t = NULL;
  CHECK(kl_tower_new(s, 4, "1+z", 2, 2, &t) == KL_OK);
  CHECK(t != NULL);
  CHECK(kl_tower_levels(t) == 2);
  unsigned long long norms[4] = {0};
  size_t count = 0;
  CHECK(kl_tower_norms(s, t, 3, norms, 4, &count) == KL_OK);
  CHECK(count == 3);
  CHECK(norms[0] == 9 && norms[1] == 81 && norms[2] == 6561);
  /* over 7 the norm 2 of 1+i is a square mod 7, so the first step splits */
  CHECK(kl_tower_norms(s, t, 7, norms, 4, &count) == KL_EINVAL);
  CHECK(strlen(kl_last_error(s)) > 0);
  kl_tower_free(t);

  /* mu_3 is not in Q(i) */
  t = NULL;
  CHECK(kl_tower_new(s, 4, "1+z", 3, 2, &t) == KL_EINVAL);
  CHECK(t == NULL);
  CHECK(kl_tower_new(s, 4, "1+", 2, 2, &t) == KL_EINVAL);

  kl_result* r = NULL;
  int code = kl_run(s, "{\"command\": \"lemma 44\", \"m\": 4, \"alpha\": \"1+z\", \"p\": 2, \"r\": 2, \"q\": 3}", &r);
  CHECK(code == KL_OK);
  CHECK(kl_result_code(r) == KL_OK);
  CHECK(strstr(kl_result_text(r), "\"schema\": 1") != NULL);
  CHECK(strstr(kl_result_text(r), "6561") != NULL);
  CHECK(kl_result_size(r) == strlen(kl_result_text(r)));
  kl_result_free(r);

  r = NULL;
  code = kl_run(s, "{\"command\": \"no such thing\"}", &r);
  CHECK(code == KL_EINVAL);
  CHECK(r != NULL && kl_result_code(r) == KL_EINVAL);
  CHECK(strstr(kl_result_text(r), "error") != NULL);
  kl_result_free(r);

  r = NULL;
  code = kl_run(s, "not json", &r);
  CHECK(code == KL_EINVAL);
  kl_result_free(r);

  CHECK(kl_run(s, NULL, &r) == KL_EINVAL);
  CHECK(kl_run(NULL, "{}", &r) == KL_EINVAL);

  /* identical chains are not disjoint: every tuple is an exception */
  r = NULL;
  code = kl_run(s, "{\"command\": \"lemma 45\", \"m\": 4, \"alpha\": [\"1+z\", \"1+z\"], \"p\": 2, \"r\": 1, \"X\": 50}", &r);
  CHECK(code == KL_INCONCLUSIVE);
  kl_result_free(r);

  r = NULL;
  code = kl_run(s,
                "{\"command\": \"theorem-a\", \"K\": \"Q(i)\", \"X\": 2000, \"pair\": {"
                "\"pi\": [{\"character\": {\"trivial\": true}}, {\"character\": {\"modulus\": 5, \"generators\": [1]}}],"
                "\"pi2\": [{\"character\": {\"modulus\": 13, \"generators\": [3]}}, {\"character\": {\"modulus\": 5, "
                "\"generators\": [1]}}]}}",
                &r);
  CHECK(code == KL_NOT_HYPOTHESIS);
  CHECK(strstr(kl_result_text(r), "NOT-HYPOTHESIS") != NULL);
  kl_result_free(r);

  kl_result_free(NULL);
  kl_tower_free(NULL);
  kl_session_free(s);
  if (failures) {
    fprintf(stderr, "%d failures\n", failures);
    return 1;
  }
  printf("capi: all checks passed\n");
  return 0;
}
