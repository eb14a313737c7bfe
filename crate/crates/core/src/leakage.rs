//! Leakage profiles: which row pairs the server learns share a join value.
//!
//! [`ideal_leakage`] is the target (per-query equality pairs, transitively
//! closed), [`observed_leakage`] is what the tags actually reveal, and
//! [`baseline_leakage`] simulates the comparison schemes at the plaintext
//! level.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::joincore::{oracle_join, satisfying_rows, JoinQuery, PlainTable, RowRef, TableSide, Tag};
use crate::predicate::AttributeValue;

/// Unordered pair of distinct rows, stored with the smaller ref first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EqualityPair(RowRef, RowRef);

impl EqualityPair {
    /// `None` when both refs are the same row.
    pub fn new(x: RowRef, y: RowRef) -> Option<Self> {
        match x.cmp(&y) {
            std::cmp::Ordering::Less => Some(Self(x, y)),
            std::cmp::Ordering::Greater => Some(Self(y, x)),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn first(&self) -> RowRef {
        self.0
    }

    pub fn second(&self) -> RowRef {
        self.1
    }

    pub fn is_cross_table(&self) -> bool {
        self.0.side != self.1.side
    }
}

impl fmt::Display for EqualityPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.0, self.1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LeakageProfile {
    pub pairs: BTreeSet<EqualityPair>,
    pub closed: bool,
}

impl LeakageProfile {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn is_subset(&self, other: &LeakageProfile) -> bool {
        self.pairs.is_subset(&other.pairs)
    }

    fn add_clique(&mut self, members: &[RowRef]) {
        for (i, &x) in members.iter().enumerate() {
            for &y in &members[i + 1..] {
                self.pairs.extend(EqualityPair::new(x, y));
            }
        }
    }

    /// All pairs inside each connected component of the pair graph.
    pub fn transitive_closure(&self) -> LeakageProfile {
        let mut index: BTreeMap<RowRef, usize> = BTreeMap::new();
        for p in &self.pairs {
            for r in [p.0, p.1] {
                let next = index.len();
                index.entry(r).or_insert(next);
            }
        }
        let mut uf = UnionFind::new(index.len());
        for p in &self.pairs {
            uf.union(index[&p.0], index[&p.1]);
        }
        let mut components: BTreeMap<usize, Vec<RowRef>> = BTreeMap::new();
        for (&r, &i) in &index {
            components.entry(uf.find(i)).or_default().push(r);
        }
        let mut out = LeakageProfile {
            closed: true,
            ..Default::default()
        };
        for members in components.values() {
            out.add_clique(members);
        }
        out
    }
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        match self.rank[a].cmp(&self.rank[b]) {
            std::cmp::Ordering::Less => self.parent[a] = b,
            std::cmp::Ordering::Greater => self.parent[b] = a,
            std::cmp::Ordering::Equal => {
                self.parent[b] = a;
                self.rank[a] += 1;
            }
        }
    }
}

/// Per-query equality pairs of the first `upto` queries, closed.
pub fn ideal_leakage(
    table_a: &PlainTable,
    table_b: &PlainTable,
    queries: &[JoinQuery],
    upto: usize,
) -> LeakageProfile {
    let mut raw = LeakageProfile::default();
    for q in &queries[..upto.min(queries.len())] {
        for group in oracle_join(table_a, table_b, q).groups {
            raw.add_clique(&group);
        }
    }
    raw.transitive_closure()
}

/// Rows whose tags are byte-equal, compared across every query. Not closed.
pub fn observed_leakage(tags: &[Tag]) -> LeakageProfile {
    let mut buckets: HashMap<&[u8], Vec<RowRef>> = HashMap::new();
    for t in tags {
        buckets.entry(&t.bytes).or_default().push(t.row);
    }
    let mut out = LeakageProfile::default();
    for mut members in buckets.into_values() {
        members.sort_unstable();
        members.dedup();
        out.add_clique(&members);
    }
    out
}

/// Number of pairs of tags from different queries with equal bytes.
pub fn cross_query_collisions(tags: &[Tag]) -> usize {
    let mut buckets: HashMap<&[u8], BTreeMap<u64, usize>> = HashMap::new();
    for t in tags {
        *buckets.entry(&t.bytes).or_default().entry(t.query_id).or_default() += 1;
    }
    buckets
        .values()
        .map(|per_query| {
            let total: usize = per_query.values().sum();
            let same: usize = per_query.values().map(|c| c * (c - 1) / 2).sum();
            total * (total - 1) / 2 - same
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BaselineModel {
    Det,
    Onion,
    KpAbeSelect,
    SecureJoin,
}

impl BaselineModel {
    pub const ALL: [BaselineModel; 4] = [
        BaselineModel::Det,
        BaselineModel::Onion,
        BaselineModel::KpAbeSelect,
        BaselineModel::SecureJoin,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaselineModel::Det => "DET",
            BaselineModel::Onion => "ONION",
            BaselineModel::KpAbeSelect => "KPABE_SELECT",
            BaselineModel::SecureJoin => "SECURE_JOIN",
        }
    }
}

impl fmt::Display for BaselineModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaselineModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BaselineModel::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownModel(s.to_string()))
    }
}

fn rows_with_values<'a>(
    table: &'a PlainTable,
    side: TableSide,
) -> impl Iterator<Item = (RowRef, &'a AttributeValue)> + 'a {
    table.rows.iter().map(move |r| (RowRef { side, row_id: r.row_id }, &r.join_value))
}

fn equal_value_pairs<'a>(rows: impl IntoIterator<Item = (RowRef, &'a AttributeValue)>) -> LeakageProfile {
    let mut by_value: BTreeMap<&AttributeValue, Vec<RowRef>> = BTreeMap::new();
    for (r, v) in rows {
        by_value.entry(v).or_default().push(r);
    }
    let mut out = LeakageProfile {
        closed: true,
        ..Default::default()
    };
    for mut members in by_value.into_values() {
        members.sort_unstable();
        members.dedup();
        out.add_clique(&members);
    }
    out
}

/// What `model` reveals after the first `upto` queries of the workload.
pub fn baseline_leakage(
    model: BaselineModel,
    table_a: &PlainTable,
    table_b: &PlainTable,
    queries: &[JoinQuery],
    upto: usize,
) -> LeakageProfile {
    let upto = upto.min(queries.len());
    let everything = || {
        equal_value_pairs(rows_with_values(table_a, TableSide::A).chain(rows_with_values(table_b, TableSide::B)))
    };
    match model {
        BaselineModel::Det => everything(),
        BaselineModel::Onion if upto == 0 => LeakageProfile {
            closed: true,
            ..Default::default()
        },
        BaselineModel::Onion => everything(),
        BaselineModel::KpAbeSelect => {
            let mut unwrapped: BTreeMap<RowRef, &AttributeValue> = BTreeMap::new();
            for q in &queries[..upto] {
                unwrapped.extend(satisfying_rows(table_a, TableSide::A, &q.clause_a));
                unwrapped.extend(satisfying_rows(table_b, TableSide::B, &q.clause_b));
            }
            equal_value_pairs(unwrapped)
        }
        BaselineModel::SecureJoin => ideal_leakage(table_a, table_b, queries, upto),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportRow {
    /// A baseline model name, or a label such as `OBSERVED`.
    pub model: String,
    pub time_index: usize,
    pub profile: LeakageProfile,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LeakageReport {
    pub rows: Vec<ReportRow>,
}

/// Profiles for every model at time indices `0..=queries.len()`.
pub fn leakage_report(
    models: &[BaselineModel],
    table_a: &PlainTable,
    table_b: &PlainTable,
    queries: &[JoinQuery],
) -> LeakageReport {
    let mut rows = Vec::new();
    for &model in models {
        for time_index in 0..=queries.len() {
            rows.push(ReportRow {
                model: model.name().to_string(),
                time_index,
                profile: baseline_leakage(model, table_a, table_b, queries, time_index),
            });
        }
    }
    LeakageReport { rows }
}

impl LeakageReport {
    pub fn push(&mut self, model: impl Into<String>, time_index: usize, profile: LeakageProfile) {
        self.rows.push(ReportRow {
            model: model.into(),
            time_index,
            profile,
        });
    }

    /// Pair counts per model in time order, e.g. `DET -> [6, 6, 6]`.
    pub fn timeline(&self) -> BTreeMap<&str, Vec<usize>> {
        let mut out: BTreeMap<&str, Vec<(usize, usize)>> = BTreeMap::new();
        for r in &self.rows {
            out.entry(&r.model).or_default().push((r.time_index, r.profile.len()));
        }
        out.into_iter()
            .map(|(k, mut v)| {
                v.sort_unstable();
                (k, v.into_iter().map(|(_, c)| c).collect())
            })
            .collect()
    }

    fn ordered_models(&self) -> Vec<&str> {
        let mut seen = Vec::new();
        for r in &self.rows {
            if !seen.contains(&r.model.as_str()) {
                seen.push(&r.model);
            }
        }
        seen
    }

    pub fn to_text(&self) -> String {
        let timeline = self.timeline();
        let models = self.ordered_models();
        let width = models.iter().map(|m| m.len()).max().unwrap_or(0);
        let mut out = String::new();
        writeln!(out, "{:width$}  pairs at t0/t1/...", "model").unwrap();
        for m in models {
            let counts: Vec<String> = timeline[m].iter().map(usize::to_string).collect();
            writeln!(out, "{m:width$}  {}", counts.join("/")).unwrap();
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("model,time_index,pair_count,pairs\n");
        for r in &self.rows {
            let pairs: Vec<String> = r.profile.pairs.iter().map(ToString::to_string).collect();
            writeln!(out, "{},{},{},{}", r.model, r.time_index, r.profile.len(), pairs.join(" ")).unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::joincore::{PlainRow, TableSchema};
    use crate::predicate::SelectionClause;

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

    fn workload() -> Vec<JoinQuery> {
        vec![
            JoinQuery::new(
                1,
                SelectionClause::unconstrained().with_in(0, ["Web Application"]),
                SelectionClause::unconstrained().with_in(1, ["Tester"]),
            ),
            JoinQuery::new(
                2,
                SelectionClause::unconstrained().with_in(0, ["Database"]),
                SelectionClause::unconstrained().with_in(1, ["Programmer"]),
            ),
        ]
    }

    fn pair(x: RowRef, y: RowRef) -> EqualityPair {
        EqualityPair::new(x, y).unwrap()
    }

    #[test]
    fn pair_is_unordered() {
        assert_eq!(pair(RowRef::b(2), RowRef::a(1)), pair(RowRef::a(1), RowRef::b(2)));
        assert!(EqualityPair::new(RowRef::a(1), RowRef::a(1)).is_none());
        assert_eq!(pair(RowRef::b(2), RowRef::a(1)).to_string(), "A:1=B:2");
    }

    #[test]
    fn ideal_timeline_of_worked_example() {
        let (a, b, q) = (teams(), employees(), workload());
        assert!(ideal_leakage(&a, &b, &q, 0).is_empty());
        let t1 = ideal_leakage(&a, &b, &q, 1);
        assert_eq!(t1.pairs, BTreeSet::from([pair(RowRef::a(1), RowRef::b(2))]));
        let t2 = ideal_leakage(&a, &b, &q, 2);
        assert_eq!(
            t2.pairs,
            BTreeSet::from([pair(RowRef::a(1), RowRef::b(2)), pair(RowRef::a(2), RowRef::b(3))])
        );
        assert!(t2.closed);
    }

    #[test]
    fn closure_completes_components() {
        let mut p = LeakageProfile::default();
        p.pairs.insert(pair(RowRef::a(1), RowRef::b(1)));
        p.pairs.insert(pair(RowRef::a(1), RowRef::b(2)));
        p.pairs.insert(pair(RowRef::a(5), RowRef::b(6)));
        let c = p.transitive_closure();
        assert_eq!(c.len(), 4);
        assert!(c.pairs.contains(&pair(RowRef::b(1), RowRef::b(2))));
        assert_eq!(c.transitive_closure(), c);
    }

    #[test]
    fn baseline_timelines_of_worked_example() {
        let report = leakage_report(&BaselineModel::ALL, &teams(), &employees(), &workload());
        let tl = report.timeline();
        assert_eq!(tl["DET"], vec![6, 6, 6]);
        assert_eq!(tl["ONION"], vec![0, 6, 6]);
        assert_eq!(tl["KPABE_SELECT"], vec![0, 1, 6]);
        assert_eq!(tl["SECURE_JOIN"], vec![0, 1, 2]);
        let kp1 = baseline_leakage(BaselineModel::KpAbeSelect, &teams(), &employees(), &workload(), 1);
        assert_eq!(kp1.pairs, BTreeSet::from([pair(RowRef::a(1), RowRef::b(2))]));
    }

    #[test]
    fn report_renderings() {
        let report = leakage_report(&BaselineModel::ALL, &teams(), &employees(), &workload());
        let text = report.to_text();
        assert!(text.contains("DET           6/6/6"), "{text}");
        assert!(text.contains("SECURE_JOIN   0/1/2"), "{text}");
        let csv = report.to_csv();
        assert!(csv.starts_with("model,time_index,pair_count,pairs\n"));
        assert!(csv.contains("SECURE_JOIN,2,2,A:1=B:2 A:2=B:3\n"), "{csv}");
        assert_eq!(leakage_report(&BaselineModel::ALL, &teams(), &employees(), &workload()), report);
    }

    #[test]
    fn empty_workload_reports_zero_for_query_driven_models() {
        let report = leakage_report(&BaselineModel::ALL, &teams(), &employees(), &[]);
        let tl = report.timeline();
        assert_eq!(tl["ONION"], vec![0]);
        assert_eq!(tl["KPABE_SELECT"], vec![0]);
        assert_eq!(tl["SECURE_JOIN"], vec![0]);
    }

    #[test]
    fn model_names_parse() {
        assert_eq!("kpabe_select".parse::<BaselineModel>().unwrap(), BaselineModel::KpAbeSelect);
        assert!(matches!("rot13".parse::<BaselineModel>(), Err(Error::UnknownModel(_))));
    }

    fn tag(q: u64, row: RowRef, b: u8) -> Tag {
        Tag {
            bytes: vec![b],
            row,
            query_id: q,
        }
    }

    #[test]
    fn observed_pairs_from_one_group_of_three() {
        let tags = [
            tag(1, RowRef::a(1), 9),
            tag(1, RowRef::b(1), 9),
            tag(1, RowRef::b(2), 9),
            tag(1, RowRef::b(3), 4),
        ];
        let obs = observed_leakage(&tags);
        assert_eq!(obs.len(), 3);
        assert_eq!(obs.pairs.iter().filter(|p| p.is_cross_table()).count(), 2);
        assert!(!obs.closed);
        assert!(observed_leakage(&[]).is_empty());
        assert_eq!(cross_query_collisions(&tags), 0);
    }

    #[test]
    fn cross_query_collisions_counted() {
        let tags = [
            tag(1, RowRef::a(1), 9),
            tag(1, RowRef::b(1), 9),
            tag(2, RowRef::b(2), 9),
            tag(2, RowRef::b(3), 1),
        ];
        assert_eq!(cross_query_collisions(&tags), 2);
    }
}
