/* C interface of libnlpl_bridge. Constructors return NULL and status
 * functions return nonzero on failure; nlpl_last_error() then holds the
 * message. Release every returned object with its _free function. */
#ifndef NLPL_BRIDGE_H
#define NLPL_BRIDGE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct Session NlplSession;
typedef struct PlanHandle NlplPlan;
typedef struct BridgeBatch NlplBatch;

enum { NLPL_TASK_SCLM = 0, NLPL_TASK_PTLM = 1 };

const char *nlpl_version(void);
const char *nlpl_last_error(void);

NlplSession *nlpl_session_open(const char *vocab_path); /* NULL path: scoring only */
void nlpl_session_free(NlplSession *session);

int nlpl_encode(const NlplSession *session, const char *text, uint32_t **out_ids, size_t *out_len);
void nlpl_ids_free(uint32_t *ids, size_t len);
char *nlpl_decode(const NlplSession *session, const uint32_t *ids, size_t len);
void nlpl_string_free(char *s);

NlplPlan *nlpl_plan_open(const NlplSession *session, const char *config_path,
                         const char *plan_path, const char *expected_digest);
char *nlpl_plan_digest(const NlplPlan *plan);
void nlpl_plan_free(NlplPlan *plan);

NlplBatch *nlpl_next_batch(NlplPlan *plan, size_t batch_size);
size_t nlpl_batch_len(const NlplBatch *batch);
const uint32_t *nlpl_batch_ids(const NlplBatch *batch, size_t *out_len);
const uint32_t *nlpl_batch_lengths(const NlplBatch *batch, size_t *out_len);
const uint8_t *nlpl_batch_tasks(const NlplBatch *batch);
const uint64_t *nlpl_batch_indices(const NlplBatch *batch);
void nlpl_batch_free(NlplBatch *batch);

/* JSON object of CodeBLEU components; null for a component not computed. */
char *nlpl_codebleu(const NlplSession *session, const char *hyp, const char *reference);

#ifdef __cplusplus
}
#endif

#endif
