//! Per-class heap histograms in the `jmap -histo` text layout, plus the
//! consecutive-snapshot diff used to count objects surviving a collection.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Header emitted before histogram rows, byte-for-byte the `jmap -histo` one.
pub const HISTO_HEADER: &str = "num     #instances         #bytes  class name";

#[derive(Debug, Error)]
pub enum HistogramError {
    #[error("histogram line {line}: {reason}")]
    ParseLine { line: usize, reason: String },
}

/// One histogram row: rank, class name, live instance count and their bytes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramRow {
    pub rank: u64,
    pub class_name: String,
    pub instances: u64,
    pub bytes: u64,
}

/// An ordered per-class `(instances, bytes)` snapshot.
///
/// Histograms built from a heap have consecutive ranks starting at 1; parsed
/// histograms keep whatever ranks the source file carried (fragments of a
/// larger listing are common).
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Histogram {
    rows: Vec<HistogramRow>,
}

impl Histogram {
    /// Builds a ranked histogram from per-class totals, ordered by descending
    /// bytes and then ascending class name.
    pub fn from_class_totals(totals: BTreeMap<String, (u64, u64)>) -> Self {
        let mut entries: Vec<(String, u64, u64)> = totals
            .into_iter()
            .map(|(name, (instances, bytes))| (name, instances, bytes))
            .collect();
        entries.sort_by(|a, b| b.2.cmp(&a.2).then_with(|| a.0.cmp(&b.0)));
        let rows = entries
            .into_iter()
            .enumerate()
            .map(|(i, (class_name, instances, bytes))| HistogramRow {
                rank: i as u64 + 1,
                class_name,
                instances,
                bytes,
            })
            .collect();
        Histogram { rows }
    }

    pub fn rows(&self) -> &[HistogramRow] {
        &self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    /// Looks a class up by name.
    pub fn get(&self, class_name: &str) -> Option<&HistogramRow> {
        self.rows.iter().find(|r| r.class_name == class_name)
    }

    /// Renders the jmap-compatible text form: header, then
    /// `<n>:<tab><instances><tab><bytes><tab><class name>` rows.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(HISTO_HEADER);
        out.push('\n');
        for row in &self.rows {
            writeln!(
                out,
                "{}:\t{}\t{}\t{}",
                row.rank, row.instances, row.bytes, row.class_name
            )
            .expect("string write");
        }
        out
    }

    /// Renders the machine-friendly CSV variant.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("class_name,instances,bytes\n");
        for row in &self.rows {
            writeln!(out, "{},{},{}", row.class_name, row.instances, row.bytes)
                .expect("string write");
        }
        out
    }

    /// Parses the jmap-compatible layout. The header is optional and columns
    /// may be separated by any whitespace; `Total` summary lines are skipped.
    pub fn parse(text: &str) -> Result<Self, HistogramError> {
        let mut rows = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let first = fields.next().expect("non-empty line has a first field");
            if first == "num"
                || first.eq_ignore_ascii_case("total")
                || first.eq_ignore_ascii_case("total:")
            {
                continue;
            }
            let rank_tok = first.strip_suffix(':').unwrap_or(first);
            let rank = rank_tok
                .parse::<u64>()
                .map_err(|_| HistogramError::ParseLine {
                    line: line_no,
                    reason: format!("rank field `{first}` is not an integer"),
                })?;
            let instances = parse_count(fields.next(), line_no, "instances")?;
            let bytes = parse_count(fields.next(), line_no, "bytes")?;
            let class_name = fields.collect::<Vec<_>>().join(" ");
            if class_name.is_empty() {
                return Err(HistogramError::ParseLine {
                    line: line_no,
                    reason: "missing class name".into(),
                });
            }
            if instances == 0 {
                return Err(HistogramError::ParseLine {
                    line: line_no,
                    reason: "instance count must be at least 1".into(),
                });
            }
            rows.push(HistogramRow {
                rank,
                class_name,
                instances,
                bytes,
            });
        }
        Ok(Histogram { rows })
    }
}

fn parse_count(field: Option<&str>, line: usize, what: &str) -> Result<u64, HistogramError> {
    let tok = field.ok_or_else(|| HistogramError::ParseLine {
        line,
        reason: format!("missing {what} field"),
    })?;
    tok.parse::<u64>().map_err(|_| HistogramError::ParseLine {
        line,
        reason: format!("{what} field `{tok}` is not an integer"),
    })
}

/// Per-class change between two snapshots: `new - old`, with a class absent
/// from one side contributing zero there.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassDelta {
    pub class_name: String,
    pub delta_instances: i64,
    pub delta_bytes: i64,
}

/// Subtracts the old snapshot from the new one, per class, sorted by class
/// name. Removing the old instance count from the new one gives the number of
/// objects surviving between the two snapshots.
pub fn histo_diff(old: &Histogram, new: &Histogram) -> Vec<ClassDelta> {
    let mut acc: BTreeMap<&str, (i64, i64)> = BTreeMap::new();
    for row in old.rows() {
        let e = acc.entry(&row.class_name).or_default();
        e.0 -= row.instances as i64;
        e.1 -= row.bytes as i64;
    }
    for row in new.rows() {
        let e = acc.entry(&row.class_name).or_default();
        e.0 += row.instances as i64;
        e.1 += row.bytes as i64;
    }
    acc.into_iter()
        .map(|(class_name, (delta_instances, delta_bytes))| ClassDelta {
            class_name: class_name.to_string(),
            delta_instances,
            delta_bytes,
        })
        .collect()
}

/// CSV form of a delta list: `class_name,delta_instances,delta_bytes`.
pub fn delta_csv(deltas: &[ClassDelta]) -> String {
    let mut out = String::from("class_name,delta_instances,delta_bytes\n");
    for d in deltas {
        writeln!(
            out,
            "{},{},{}",
            d.class_name, d.delta_instances, d.delta_bytes
        )
        .expect("string write");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    // Row fragments as printed in the two jmap runs the format mirrors.
    const RUN1: &str = "num	#instances	#bytes	class name
4:	13203	1511320	<constMethodKlass>
27:	15736	251776	com.sun.media.sound.ModelSource
137:	659	10544	javax.swing.ArrayTable
891:	3	72	java.awt.Polygon
1305:	1	24	sun.nio.cs.US_ASCII
";
    const RUN2: &str = "num	#instances	#bytes	class name
4:	13199	1510976	<constMethodKlass>
30:	15736	251776	com.sun.media.sound.ModelSource
163:	659	10544	javax.swing.ArrayTable
911:	3	72	java.awt.Polygon
1223:	1	24	sun.nio.cs.US_ASCII
";

    #[test]
    fn parse_known_rows() {
        let h = Histogram::parse(RUN1).unwrap();
        assert_eq!(h.len(), 5);
        assert_eq!(
            h.rows()[0],
            HistogramRow {
                rank: 4,
                class_name: "<constMethodKlass>".into(),
                instances: 13203,
                bytes: 1511320,
            }
        );
        assert_eq!(
            h.rows()[4],
            HistogramRow {
                rank: 1305,
                class_name: "sun.nio.cs.US_ASCII".into(),
                instances: 1,
                bytes: 24,
            }
        );
    }

    #[test]
    fn parse_whitespace_flexible_and_headerless() {
        let h = Histogram::parse("4:   13203    1511320   <constMethodKlass>").unwrap();
        assert_eq!(h.rows()[0].rank, 4);
        assert_eq!(h.rows()[0].instances, 13203);
        assert_eq!(h.rows()[0].bytes, 1511320);
        assert_eq!(h.rows()[0].class_name, "<constMethodKlass>");
    }

    #[test]
    fn parse_empty_input() {
        let h = Histogram::parse("").unwrap();
        assert!(h.is_empty());
    }

    #[test]
    fn parse_rejects_non_integer_fields() {
        let err = Histogram::parse("1: x 24 a.B").unwrap_err();
        assert!(err.to_string().contains("line 1"));
        assert!(Histogram::parse("1: 3 oops a.B").is_err());
    }

    #[test]
    fn text_round_trip_preserves_rows() {
        let h = Histogram::parse(RUN1).unwrap();
        let again = Histogram::parse(&h.to_text()).unwrap();
        assert_eq!(h, again);
    }

    #[test]
    fn diff_between_the_two_runs() {
        let old = Histogram::parse(RUN1).unwrap();
        let new = Histogram::parse(RUN2).unwrap();
        let deltas = histo_diff(&old, &new);
        let cmk = deltas
            .iter()
            .find(|d| d.class_name == "<constMethodKlass>")
            .unwrap();
        assert_eq!(cmk.delta_instances, -4);
        assert_eq!(cmk.delta_bytes, -344);
        let ms = deltas
            .iter()
            .find(|d| d.class_name == "com.sun.media.sound.ModelSource")
            .unwrap();
        assert_eq!(ms.delta_instances, 0);
        assert_eq!(ms.delta_bytes, 0);
    }

    #[test]
    fn diff_handles_absent_classes_and_self_diff() {
        let a = Histogram::parse("1: 2 64 only.in.A").unwrap();
        let b = Histogram::parse("1: 5 80 only.in.B").unwrap();
        let d = histo_diff(&a, &b);
        assert_eq!(d.len(), 2);
        assert_eq!(d[0].class_name, "only.in.A");
        assert_eq!(d[0].delta_instances, -2);
        assert_eq!(d[1].delta_instances, 5);

        for z in histo_diff(&a, &a) {
            assert_eq!(z.delta_instances, 0);
            assert_eq!(z.delta_bytes, 0);
        }
    }

    #[test]
    fn ranking_orders_by_bytes_then_name() {
        let mut totals = BTreeMap::new();
        totals.insert("B".to_string(), (1u64, 72u64));
        totals.insert("A".to_string(), (3u64, 72u64));
        totals.insert("C".to_string(), (1u64, 128u64));
        let h = Histogram::from_class_totals(totals);
        let names: Vec<&str> = h.rows().iter().map(|r| r.class_name.as_str()).collect();
        assert_eq!(names, vec!["C", "A", "B"]);
        assert_eq!(h.rows()[0].rank, 1);
        assert_eq!(h.rows()[2].rank, 3);
    }

    #[test]
    fn header_bytes_are_pinned() {
        let h = Histogram::parse("1: 1 24 a.B").unwrap();
        assert_eq!(
            h.to_text().lines().next().unwrap(),
            "num     #instances         #bytes  class name"
        );
    }

    #[test]
    fn csv_shape() {
        let h = Histogram::parse("1: 3 72 java.awt.Polygon").unwrap();
        assert_eq!(
            h.to_csv(),
            "class_name,instances,bytes\njava.awt.Polygon,3,72\n"
        );
    }
}
