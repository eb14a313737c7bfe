use std::collections::BTreeMap;

use super::{JoinQuery, MatchResult, PlainTable, RowRef, TableSide};
use crate::predicate::{AttributeValue, SelectionClause};

/// Rows of `table` accepted by `clause`, as `(row, join value)`.
pub fn satisfying_rows<'a>(
    table: &'a PlainTable,
    side: TableSide,
    clause: &'a SelectionClause,
) -> impl Iterator<Item = (RowRef, &'a AttributeValue)> + 'a {
    table
        .rows
        .iter()
        .filter(move |r| clause.accepts(&r.attrs))
        .map(move |r| {
            (
                RowRef {
                    side,
                    row_id: r.row_id,
                },
                &r.join_value,
            )
        })
}

/// Plaintext reference: rows satisfying their table's clause, grouped by
/// join value.
pub fn oracle_join(table_a: &PlainTable, table_b: &PlainTable, query: &JoinQuery) -> MatchResult {
    let mut by_value: BTreeMap<&AttributeValue, Vec<RowRef>> = BTreeMap::new();
    let rows = satisfying_rows(table_a, TableSide::A, &query.clause_a)
        .chain(satisfying_rows(table_b, TableSide::B, &query.clause_b));
    for (row, value) in rows {
        by_value.entry(value).or_default().push(row);
    }
    MatchResult::from_buckets(query.id, by_value.into_values())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::joincore::{PlainRow, TableSchema};

    fn teams() -> PlainTable {
        PlainTable::new(
            TableSchema::new("Teams", "Key", &["Name"]),
            vec![
                PlainRow::new(1, "1", &["Web Application"]),
                PlainRow::new(2, "2", &["Database"]),
            ],
        )
        .unwrap()
    }

    fn employees() -> PlainTable {
        PlainTable::new(
            TableSchema::new("Employees", "Team", &["Employee", "Role"]),
            vec![
                PlainRow::new(1, "1", &["Hans", "Programmer"]),
                PlainRow::new(2, "1", &["Kaily", "Tester"]),
                PlainRow::new(3, "2", &["John", "Programmer"]),
                PlainRow::new(4, "2", &["Sally", "Tester"]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn first_query_of_worked_example() {
        let q = JoinQuery::new(
            1,
            SelectionClause::unconstrained().with_in(0, ["Web Application"]),
            SelectionClause::unconstrained().with_in(1, ["Tester"]),
        );
        let r = oracle_join(&teams(), &employees(), &q);
        assert_eq!(r.join_pairs, vec![(1, 2)]);
        assert_eq!(r.groups, vec![vec![RowRef::a(1), RowRef::b(2)]]);
    }

    #[test]
    fn unconstrained_join_includes_intra_table_pairs() {
        let q = JoinQuery::new(2, SelectionClause::unconstrained(), SelectionClause::unconstrained());
        let r = oracle_join(&teams(), &employees(), &q);
        assert_eq!(r.join_pairs, vec![(1, 1), (1, 2), (2, 3), (2, 4)]);
        assert_eq!(
            r.groups,
            vec![
                vec![RowRef::a(1), RowRef::b(1), RowRef::b(2)],
                vec![RowRef::a(2), RowRef::b(3), RowRef::b(4)],
            ]
        );
    }

    #[test]
    fn empty_tables() {
        let empty = PlainTable::new(TableSchema::new("E", "k", &["a"]), vec![]).unwrap();
        let q = JoinQuery::new(1, SelectionClause::unconstrained(), SelectionClause::unconstrained());
        assert_eq!(oracle_join(&empty, &empty, &q), MatchResult { query_id: 1, ..Default::default() });
    }
}
