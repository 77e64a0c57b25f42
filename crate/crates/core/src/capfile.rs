//! Text format for point sets and the machine-readable solve record.
//!
//! A cap file starts with a header line `n <modulus>` followed by one
//! `<u> <v>` line per point, 0-based. Blank lines and lines starting with `#`
//! are ignored.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ZcapError};
use crate::geometry::Point;
use crate::solvers::{Problem, SolveResult, Status, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapFile {
    pub n: u32,
    pub points: Vec<Point>,
}

impl CapFile {
    pub fn parse(text: &str) -> Result<CapFile> {
        let err = |line: usize, message: String| ZcapError::Parse { line, message };
        let mut n = None;
        let mut points = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let Some(modulus) = n else {
                match fields.as_slice() {
                    ["n", m] => {
                        let m: u32 = m.parse().map_err(|_| err(line_no, format!("invalid modulus '{m}'")))?;
                        if m == 0 {
                            return Err(err(line_no, "modulus must be positive".into()));
                        }
                        n = Some(m);
                        continue;
                    }
                    _ => return Err(err(line_no, format!("expected header 'n <modulus>', found '{line}'"))),
                }
            };
            let [u, v] = fields.as_slice() else {
                return Err(err(line_no, format!("expected '<u> <v>', found '{line}'")));
            };
            let coord = |s: &str| -> Result<u32> {
                let c: u32 = s.parse().map_err(|_| err(line_no, format!("invalid coordinate '{s}'")))?;
                if c >= modulus {
                    return Err(err(line_no, format!("coordinate {c} out of range for n = {modulus}")));
                }
                Ok(c)
            };
            let p = Point::new(coord(u)?, coord(v)?);
            if !seen.insert(p) {
                return Err(err(line_no, format!("duplicate point {p}")));
            }
            points.push(p);
        }
        let n = n.ok_or_else(|| err(text.lines().count().max(1), "missing header 'n <modulus>'".into()))?;
        Ok(CapFile { n, points })
    }

    pub fn read(path: &Path) -> Result<CapFile> {
        let text =
            std::fs::read_to_string(path).map_err(|source| ZcapError::Io { path: path.to_path_buf(), source })?;
        CapFile::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("n {}\n", self.n);
        for p in &self.points {
            writeln!(out, "{} {}", p.u, p.v).unwrap();
        }
        out
    }
}

/// JSON form of a [`SolveResult`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub problem: Problem,
    pub n: u32,
    pub value: Value,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<Vec<[u32; 2]>>,
    pub nodes: u64,
    pub elapsed_ms: u64,
}

impl From<&SolveResult> for ResultRecord {
    fn from(r: &SolveResult) -> Self {
        ResultRecord {
            problem: r.problem,
            n: r.n,
            value: r.value,
            status: r.status,
            cap: r.certificate.as_ref().map(|c| c.points().iter().map(|p| [p.u, p.v]).collect()),
            nodes: r.nodes,
            elapsed_ms: r.elapsed.as_millis() as u64,
        }
    }
}

/// Published values and ranges, used to flag mismatches in recomputed tables.
pub fn published(problem: Problem, n: u32) -> Option<Value> {
    use Value::{Exact as E, Interval as I};
    let v = match problem {
        Problem::M2 => match n {
            2 | 3 => E(4),
            4 | 5 => E(6),
            6..=8 => E(8),
            9 => E(9),
            10..=12 | 14 => E(12),
            15 => E(15),
            16 => E(14),
            18 => E(17),
            20 | 21 => E(18),
            22 | 24 => I(18, 24),
            _ => return None,
        },
        Problem::N2 => match n {
            2 | 3 => E(4),
            5 => E(5),
            7 => E(6),
            11 => E(7),
            13 => E(8),
            17 => I(8, 10),
            19 => I(8, 11),
            23 => I(8, 12),
            25 => I(4, 6),
            29 => I(11, 15),
            31 => I(9, 16),
            37 => I(10, 17),
            41 => I(10, 20),
            43 => I(10, 21),
            47 => I(11, 22),
            _ => return None,
        },
        Problem::Sigma => {
            const EXACT: [u32; 20] = [1, 2, 2, 4, 4, 6, 6, 8, 6, 8, 10, 12, 12, 12, 13, 13, 16, 13, 18, 16];
            match n {
                1..=20 => E(EXACT[n as usize - 1]),
                21 | 22 => I(16, 17),
                23 => E(22),
                24 => I(20, 22),
                25 => I(19, 22),
                26 => I(18, 24),
                27 => I(18, 25),
                28 => I(22, 27),
                29 => E(28),
                30 => I(22, 29),
                _ => return None,
            }
        }
    };
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        let text = "# comment\n\nn 5\n0 0\n1 2\n  \n# more\n4 4\n";
        let file = CapFile::parse(text).unwrap();
        assert_eq!(file.n, 5);
        assert_eq!(file.points, vec![Point::new(0, 0), Point::new(1, 2), Point::new(4, 4)]);
        assert_eq!(CapFile::parse(&file.to_text()).unwrap(), file);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let line_of = |text: &str| match CapFile::parse(text) {
            Err(ZcapError::Parse { line, .. }) => line,
            other => panic!("expected parse error, got {other:?}"),
        };
        assert_eq!(line_of("n 3\n0 0\n1 1\n0 0\n"), 4);
        assert_eq!(line_of("n 3\n0 3\n"), 2);
        assert_eq!(line_of("# x\n0 0\n"), 2);
        assert_eq!(line_of("n 3\n1,1\n"), 2);
        assert_eq!(line_of("n 3\n1 1 1\n"), 2);
        assert_eq!(line_of("n zero\n"), 1);
        assert_eq!(line_of(""), 1);
    }

    #[test]
    fn record_json_shape() {
        let rec = ResultRecord {
            problem: Problem::M2,
            n: 22,
            value: Value::Interval(18, 24),
            status: Status::Timeout,
            cap: None,
            nodes: 10,
            elapsed_ms: 5,
        };
        let json = serde_json::to_value(&rec).unwrap();
        assert_eq!(json["value"], serde_json::json!([18, 24]));
        assert_eq!(json["status"], "timeout");
        assert!(json.get("cap").is_none());
        assert_eq!(serde_json::from_value::<ResultRecord>(json).unwrap(), rec);
    }

    #[test]
    fn published_values() {
        assert_eq!(published(Problem::M2, 9), Some(Value::Exact(9)));
        assert_eq!(published(Problem::Sigma, 17), Some(Value::Exact(16)));
        assert_eq!(published(Problem::N2, 11), Some(Value::Exact(7)));
        assert_eq!(published(Problem::M2, 13), None);
    }
}
