use std::collections::HashMap;

use super::{sj_decrypt_table, EncryptedTable, MatchResult, QueryTokenPair, RowRef, Tag};
use crate::algebra::PairingSuite;
use crate::error::{Error, Result};
use crate::fhipe::PublicParams;

/// Hash join on tag bytes: one pass to bucket, one pass over the buckets.
pub fn sj_match(query_id: u64, tags_a: &[Tag], tags_b: &[Tag]) -> MatchResult {
    let mut buckets: HashMap<&[u8], Vec<RowRef>> =
        HashMap::with_capacity(tags_a.len() + tags_b.len());
    for tag in tags_a.iter().chain(tags_b) {
        debug_assert_eq!(tag.query_id, query_id, "tags from different queries");
        buckets.entry(&tag.bytes).or_default().push(tag.row);
    }
    MatchResult::from_buckets(query_id, buckets.into_values())
}

/// Server side of one query: decrypt both tables and match. Returns the
/// tags as well so callers can archive them.
pub fn execute_join<S: PairingSuite>(
    pp: &PublicParams,
    tokens: &QueryTokenPair<S>,
    table_a: &EncryptedTable<S>,
    table_b: &EncryptedTable<S>,
) -> Result<(MatchResult, Vec<Tag>)> {
    if table_a.params != table_b.params {
        return Err(Error::SchemaMismatch(
            "tables were encrypted with different (m, t)".into(),
        ));
    }
    let mut tags = sj_decrypt_table(pp, &tokens.a, table_a)?;
    let tags_b = sj_decrypt_table(pp, &tokens.b, table_b)?;
    let result = sj_match(tokens.query_id, &tags, &tags_b);
    tags.extend(tags_b);
    Ok((result, tags))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::joincore::TableSide;

    fn tag(side: TableSide, row_id: u64, byte: u8) -> Tag {
        Tag {
            bytes: vec![byte; 4],
            row: RowRef { side, row_id },
            query_id: 1,
        }
    }

    #[test]
    fn equal_tags_join_across_tables() {
        let a = [tag(TableSide::A, 1, 7), tag(TableSide::A, 2, 8)];
        let b = [
            tag(TableSide::B, 1, 9),
            tag(TableSide::B, 2, 7),
            tag(TableSide::B, 3, 7),
        ];
        let r = sj_match(1, &a, &b);
        assert_eq!(r.join_pairs, vec![(1, 2), (1, 3)]);
        assert_eq!(r.groups, vec![vec![RowRef::a(1), RowRef::b(2), RowRef::b(3)]]);
    }

    #[test]
    fn disjoint_tags_give_empty_result() {
        let a = [tag(TableSide::A, 1, 1)];
        let b = [tag(TableSide::B, 1, 2)];
        let r = sj_match(1, &a, &b);
        assert!(r.join_pairs.is_empty() && r.groups.is_empty());
        assert_eq!(sj_match(1, &[], &[]), MatchResult { query_id: 1, ..Default::default() });
    }

    #[test]
    fn intra_table_groups_are_not_join_pairs() {
        let b = [tag(TableSide::B, 1, 5), tag(TableSide::B, 2, 5)];
        let r = sj_match(1, &[], &b);
        assert!(r.join_pairs.is_empty());
        assert_eq!(r.groups.len(), 1);
    }
}
