//! The parent relation: individuals with set-valued attribute columns.
//!
//! A [`GranularRelation`] maps row ids (individuals) to one granule per
//! named column. Summarizing a column by relative counts yields a
//! [`GranularDistribution`]; two columns form a pair of evidence sources,
//! and the relation is conflict-free on that pair when the two cells
//! intersect nonemptily in every row.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::distribution::GranularDistribution;
use crate::error::{Error, Result};
use crate::frame::{Frame, Granule};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    id: String,
    cells: Vec<Granule>,
}

impl Row {
    pub fn id(&self) -> &str {
        &self.id
    }

    /// Cells indexed parallel to the relation's column list.
    pub fn cells(&self) -> &[Granule] {
        &self.cells
    }
}

/// Rows of individuals, each with one nonempty granule per column.
/// Immutable after construction; `project_conflict` returns a new value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GranularRelation {
    frame: Frame,
    columns: Vec<String>,
    rows: Vec<Row>,
}

/// Outcome of the per-row intersection test on a column pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConflictVerdict {
    ConflictFree,
    /// Every offending row id, in row order.
    Conflicting { row_ids: Vec<String> },
}

impl ConflictVerdict {
    pub fn is_conflict_free(&self) -> bool {
        matches!(self, ConflictVerdict::ConflictFree)
    }
}

impl GranularRelation {
    pub fn new(
        frame: Frame,
        columns: Vec<String>,
        rows: Vec<(String, Vec<Granule>)>,
    ) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::NoColumns);
        }
        let mut seen_cols = HashSet::new();
        for c in &columns {
            if !seen_cols.insert(c.clone()) {
                return Err(Error::DuplicateColumn(c.clone()));
            }
        }
        if rows.is_empty() {
            return Err(Error::EmptyRelation);
        }
        let mut seen_ids = HashSet::new();
        let mut built = Vec::with_capacity(rows.len());
        for (id, cells) in rows {
            if !seen_ids.insert(id.clone()) {
                return Err(Error::DuplicateRowId(id));
            }
            if cells.len() != columns.len() {
                let column = columns
                    .get(cells.len())
                    .cloned()
                    .unwrap_or_else(|| "?".to_string());
                return Err(Error::MissingCell { row: id, column });
            }
            for cell in &cells {
                if *cell.frame() != frame {
                    return Err(Error::FrameMismatch);
                }
            }
            built.push(Row { id, cells });
        }
        Ok(GranularRelation {
            frame,
            columns,
            rows: built,
        })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    /// Relative-count summary of one column: each distinct cell value
    /// becomes a focal granule with mass (rows carrying it) / (rows).
    pub fn summarize(&self, column: &str) -> Result<GranularDistribution> {
        let col = self.column_index(column)?;
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for row in &self.rows {
            *counts.entry(row.cells[col].bits()).or_insert(0) += 1;
        }
        let total = self.rows.len() as u64;
        let entries = counts.into_iter().map(|(bits, count)| {
            (
                self.frame.granule_from_bits(bits),
                Rational::from_counts(count, total),
            )
        });
        GranularDistribution::new(self.frame.clone(), entries)
    }

    /// Checks that the two columns intersect nonemptily in every row.
    /// The offending list is exhaustive, not first-failure.
    pub fn conflict_free(&self, col_x: &str, col_y: &str) -> Result<ConflictVerdict> {
        let x = self.column_index(col_x)?;
        let y = self.column_index(col_y)?;
        let offending: Vec<String> = self
            .rows
            .iter()
            .filter(|row| row.cells[x].bits() & row.cells[y].bits() == 0)
            .map(|row| row.id.clone())
            .collect();
        if offending.is_empty() {
            Ok(ConflictVerdict::ConflictFree)
        } else {
            Ok(ConflictVerdict::Conflicting { row_ids: offending })
        }
    }

    /// Materializes the combined attribute of a conflict-free pair as a
    /// new column holding the per-row intersection.
    pub fn project_conflict(
        &self,
        col_x: &str,
        col_y: &str,
        out_column: &str,
    ) -> Result<GranularRelation> {
        let x = self.column_index(col_x)?;
        let y = self.column_index(col_y)?;
        if self.columns.iter().any(|c| c == out_column) {
            return Err(Error::DuplicateColumn(out_column.to_string()));
        }
        if let ConflictVerdict::Conflicting { row_ids } = self.conflict_free(col_x, col_y)? {
            return Err(Error::ConflictingRelation { row_ids });
        }
        let mut columns = self.columns.clone();
        columns.push(out_column.to_string());
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let bits = row.cells[x].bits() & row.cells[y].bits();
                let mut cells = row.cells.clone();
                cells.push(self.frame.granule_from_bits(bits));
                Row {
                    id: row.id.clone(),
                    cells,
                }
            })
            .collect();
        Ok(GranularRelation {
            frame: self.frame.clone(),
            columns,
            rows,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: RelationFile = serde_json::from_str(text)?;
        file.into_relation()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(RelationFile::from(self)).expect("relation serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&RelationFile::from(self)).expect("relation serializes")
    }
}

/// Wire format:
/// `{"universe":[...], "columns":["s1","s2"], "rows":[{"id":"x1","s1":["a"],"s2":["a","b"]}, ...]}`.
#[derive(Serialize, Deserialize)]
struct RelationFile {
    universe: Vec<String>,
    columns: Vec<String>,
    rows: Vec<RowFile>,
}

#[derive(Serialize, Deserialize)]
struct RowFile {
    id: String,
    #[serde(flatten)]
    cells: BTreeMap<String, Vec<String>>,
}

impl RelationFile {
    fn into_relation(self) -> Result<GranularRelation> {
        let frame = Frame::new(self.universe)?;
        let declared: HashSet<&String> = self.columns.iter().collect();
        let mut rows = Vec::with_capacity(self.rows.len());
        for row in self.rows {
            for key in row.cells.keys() {
                if !declared.contains(key) {
                    return Err(Error::UnexpectedCell {
                        row: row.id,
                        column: key.clone(),
                    });
                }
            }
            let mut cells = Vec::with_capacity(self.columns.len());
            for column in &self.columns {
                let labels = row.cells.get(column).ok_or_else(|| Error::MissingCell {
                    row: row.id.clone(),
                    column: column.clone(),
                })?;
                cells.push(frame.granule(labels)?);
            }
            rows.push((row.id, cells));
        }
        GranularRelation::new(frame, self.columns, rows)
    }
}

impl From<&GranularRelation> for RelationFile {
    fn from(rel: &GranularRelation) -> Self {
        RelationFile {
            universe: rel.frame.labels().to_vec(),
            columns: rel.columns.clone(),
            rows: rel
                .rows
                .iter()
                .map(|row| RowFile {
                    id: row.id.clone(),
                    cells: rel
                        .columns
                        .iter()
                        .cloned()
                        .zip(
                            row.cells
                                .iter()
                                .map(|g| g.labels().iter().map(|s| s.to_string()).collect()),
                        )
                        .collect(),
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame() -> Frame {
        Frame::new(["a", "b", "c"]).unwrap()
    }

    fn relation_of_cells(f: &Frame, column: &str, cells: &[&[&str]]) -> GranularRelation {
        let rows = cells
            .iter()
            .enumerate()
            .map(|(i, labels)| {
                (
                    format!("x{}", i + 1),
                    vec![f.granule(labels.iter().copied()).unwrap()],
                )
            })
            .collect();
        GranularRelation::new(f.clone(), vec![column.to_string()], rows).unwrap()
    }

    fn two_column_relation(f: &Frame, cells: &[(&[&str], &[&str])]) -> GranularRelation {
        let rows = cells
            .iter()
            .enumerate()
            .map(|(i, (x, y))| {
                (
                    format!("x{}", i + 1),
                    vec![
                        f.granule(x.iter().copied()).unwrap(),
                        f.granule(y.iter().copied()).unwrap(),
                    ],
                )
            })
            .collect();
        GranularRelation::new(f.clone(), vec!["s1".into(), "s2".into()], rows).unwrap()
    }

    // Direct count oracle: tally cells by value, divide by row count.
    fn count_oracle(cells: &[&[&str]]) -> Vec<(Vec<String>, u64)> {
        let mut counts: Vec<(Vec<String>, u64)> = Vec::new();
        for c in cells {
            let mut key: Vec<String> = c.iter().map(|s| s.to_string()).collect();
            key.sort();
            match counts.iter_mut().find(|(k, _)| *k == key) {
                Some((_, n)) => *n += 1,
                None => counts.push((key, 1)),
            }
        }
        counts
    }

    #[test]
    fn summarize_counts_individuals() {
        let f = frame();
        let cells: &[&[&str]] = &[&["a"], &["a"], &["b"]];
        let rel = relation_of_cells(&f, "s", cells);
        let d = rel.summarize("s").unwrap();
        let oracle = count_oracle(cells);
        assert_eq!(oracle.len(), d.len());
        assert_eq!(d.mass(&f.granule(["a"]).unwrap()), Rational::new(2, 3).unwrap());
        assert_eq!(d.mass(&f.granule(["b"]).unwrap()), Rational::new(1, 3).unwrap());
    }

    #[test]
    fn single_row_summarizes_to_point_mass() {
        let f = frame();
        let rel = relation_of_cells(&f, "s", &[&["a", "b"]]);
        let d = rel.summarize("s").unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.mass(&f.granule(["a", "b"]).unwrap()), Rational::one());
    }

    #[test]
    fn four_distinct_cells_get_quarter_masses() {
        let f = frame();
        let cells: &[&[&str]] = &[&["a"], &["a", "b"], &["b", "c"], &["c"]];
        let rel = relation_of_cells(&f, "s", cells);
        let d = rel.summarize("s").unwrap();
        assert_eq!(d.len(), 4);
        for (_, m) in d.focal() {
            assert_eq!(*m, Rational::new(1, 4).unwrap());
        }
    }

    #[test]
    fn summarize_is_row_order_invariant() {
        let f = frame();
        let rel1 = relation_of_cells(&f, "s", &[&["a"], &["b"], &["a", "b"]]);
        let rel2 = relation_of_cells(&f, "s", &[&["a", "b"], &["b"], &["a"]]);
        assert_eq!(rel1.summarize("s").unwrap(), rel2.summarize("s").unwrap());
    }

    #[test]
    fn conflict_free_detects_each_offender() {
        let f = frame();
        let rel = two_column_relation(&f, &[(&["a", "b"], &["b", "c"])]);
        assert!(rel.conflict_free("s1", "s2").unwrap().is_conflict_free());

        let rel = two_column_relation(&f, &[(&["a"], &["b"])]);
        assert_eq!(
            rel.conflict_free("s1", "s2").unwrap(),
            ConflictVerdict::Conflicting {
                row_ids: vec!["x1".into()]
            }
        );

        let rel = two_column_relation(
            &f,
            &[(&["a"], &["a"]), (&["b"], &["c"]), (&["a", "b"], &["b"])],
        );
        assert_eq!(
            rel.conflict_free("s1", "s2").unwrap(),
            ConflictVerdict::Conflicting {
                row_ids: vec!["x2".into()]
            }
        );
    }

    #[test]
    fn a_column_never_conflicts_with_itself() {
        let f = frame();
        let rel = relation_of_cells(&f, "s", &[&["a"], &["b", "c"]]);
        assert!(rel.conflict_free("s", "s").unwrap().is_conflict_free());
    }

    #[test]
    fn project_conflict_adds_the_intersection_column() {
        let f = frame();
        for (x, y, expect) in [
            (&["a", "b"][..], &["b", "c"][..], &["b"][..]),
            (&["a"][..], &["a"][..], &["a"][..]),
            (&["a", "b"][..], &["a", "b"][..], &["a", "b"][..]),
        ] {
            let rel = two_column_relation(&f, &[(x, y)]);
            let out = rel.project_conflict("s1", "s2", "joint").unwrap();
            assert_eq!(out.columns(), &["s1", "s2", "joint"]);
            assert_eq!(
                out.rows()[0].cells()[2],
                f.granule(expect.iter().copied()).unwrap()
            );
            // Originals retained.
            assert_eq!(out.rows()[0].cells()[..2], rel.rows()[0].cells()[..]);
        }
    }

    #[test]
    fn project_conflict_refuses_conflicting_pairs() {
        let f = frame();
        let rel = two_column_relation(&f, &[(&["a"], &["a"]), (&["a"], &["b"])]);
        match rel.project_conflict("s1", "s2", "joint") {
            Err(Error::ConflictingRelation { row_ids }) => assert_eq!(row_ids, vec!["x2"]),
            other => panic!("expected ConflictingRelation, got {other:?}"),
        }
    }

    #[test]
    fn unknown_column_is_an_error() {
        let f = frame();
        let rel = relation_of_cells(&f, "s", &[&["a"]]);
        assert!(matches!(rel.summarize("zz"), Err(Error::UnknownColumn(_))));
        assert!(matches!(
            rel.conflict_free("s", "zz"),
            Err(Error::UnknownColumn(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{
            "universe": ["a", "b", "c"],
            "columns": ["s1", "s2"],
            "rows": [
                {"id": "x1", "s1": ["a"], "s2": ["a", "b"]},
                {"id": "x2", "s1": ["b", "c"], "s2": ["b"]}
            ]
        }"#;
        let rel = GranularRelation::from_json(text).unwrap();
        assert_eq!(rel.row_count(), 2);
        let back = GranularRelation::from_json(&rel.to_json()).unwrap();
        assert_eq!(back, rel);
    }

    #[test]
    fn json_validation_names_the_offence() {
        let missing = r#"{"universe":["a"],"columns":["s1","s2"],"rows":[{"id":"x1","s1":["a"]}]}"#;
        assert!(matches!(
            GranularRelation::from_json(missing),
            Err(Error::MissingCell { .. })
        ));
        let extra = r#"{"universe":["a"],"columns":["s1"],"rows":[{"id":"x1","s1":["a"],"s9":["a"]}]}"#;
        assert!(matches!(
            GranularRelation::from_json(extra),
            Err(Error::UnexpectedCell { .. })
        ));
        let dup = r#"{"universe":["a"],"columns":["s1"],"rows":[{"id":"x1","s1":["a"]},{"id":"x1","s1":["a"]}]}"#;
        assert!(matches!(
            GranularRelation::from_json(dup),
            Err(Error::DuplicateRowId(_))
        ));
        let none = r#"{"universe":["a"],"columns":["s1"],"rows":[]}"#;
        assert!(matches!(
            GranularRelation::from_json(none),
            Err(Error::EmptyRelation)
        ));
    }
}
