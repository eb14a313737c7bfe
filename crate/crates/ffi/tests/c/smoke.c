#include <stdio.h>
#include <string.h>
#include "secjoin.h"

#define CHECK(call) do { SjStatus s_ = (call); if (s_ != SJ_STATUS_OK) { \
    fprintf(stderr, "%s -> %d: %s\n", #call, (int)s_, sj_last_error_message()); return 1; } } while (0)

static int push(SjTable *t, uint64_t id, const char *join, const char *a0, const char *a1) {
    const char *attrs[2] = {a0, a1};
    return sj_table_push_row(t, id, join, attrs, a1 ? 2 : 1) != SJ_STATUS_OK;
}

int main(void) {
    uint64_t seed = 3;
    SjKey *key = NULL;
    SjTable *teams = NULL, *emps = NULL;
    SjBytes pp, ea, eb, tok;
    SjMatch *m = NULL;
    char *text = NULL;

    CHECK(sj_key_generate(2, 1, &seed, &key));
    CHECK(sj_table_new(1, &teams));
    CHECK(sj_table_new(2, &emps));
    if (push(teams, 1, "1", "Web Application", NULL) || push(teams, 2, "2", "Database", NULL)) return 1;
    if (push(emps, 1, "1", "Hans", "Programmer") || push(emps, 2, "1", "Kaily", "Tester") ||
        push(emps, 3, "2", "John", "Programmer") || push(emps, 4, "2", "Sally", "Tester")) return 1;

    CHECK(sj_key_public_params(key, &pp));
    CHECK(sj_encrypt_table(key, teams, NULL, &ea));
    CHECK(sj_encrypt_table(key, emps, NULL, &eb));
    CHECK(sj_token_generate(key, 7, "attr=1:Web Application", "attr=2:Tester", NULL, &tok));
    CHECK(sj_join(pp.data, pp.len, tok.data, tok.len, ea.data, ea.len, eb.data, eb.len, &m));
    CHECK(sj_match_to_text(m, &text));
    fputs(text, stdout);

    if (sj_key_generate(1, 0, NULL, &key) != SJ_STATUS_PARAM) return 2;

    sj_string_free(text);
    sj_match_free(m);
    sj_bytes_free(tok);
    sj_bytes_free(eb);
    sj_bytes_free(ea);
    sj_bytes_free(pp);
    sj_table_free(emps);
    sj_table_free(teams);
    sj_key_free(key);
    return 0;
}
