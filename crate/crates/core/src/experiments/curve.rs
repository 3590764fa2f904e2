use crate::error::{Error, Result};

use super::config::{MethodKind, SweepAxis};

pub const CSV_HEADER: [&str; 5] = ["sweep_axis", "sweep_value", "method", "value", "wall_ms"];

#[derive(Debug, Clone, PartialEq)]
pub enum RowValue {
    Number(f64),
    /// Failure at this point, tagged with the error kind.
    Error(String),
}

impl RowValue {
    pub fn number(&self) -> Option<f64> {
        match self {
            RowValue::Number(v) => Some(*v),
            RowValue::Error(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub sweep_value: f64,
    pub method: MethodKind,
    pub value: RowValue,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QfiCurve {
    pub sweep_axis: SweepAxis,
    pub rows: Vec<CurveRow>,
}

/// Shortest decimal string that parses back to the same `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:?}")
}

fn parse_float(s: &str, line: usize) -> Result<f64> {
    s.parse()
        .map_err(|_| Error::config(format!("line {line}"), format!("`{s}` is not a number")))
}

impl QfiCurve {
    pub fn new(sweep_axis: SweepAxis) -> Self {
        Self {
            sweep_axis,
            rows: Vec::new(),
        }
    }

    /// `(sweep value, value)` pairs of one method, skipping error rows.
    pub fn series(&self, method: MethodKind) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.method == method)
            .filter_map(|r| r.value.number().map(|v| (r.sweep_value, v)))
            .collect()
    }

    pub fn methods(&self) -> Vec<MethodKind> {
        let mut out: Vec<MethodKind> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.method) {
                out.push(r.method);
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        for r in &self.rows {
            let value = match &r.value {
                RowValue::Number(v) => format_float(*v),
                RowValue::Error(kind) => format!("error:{kind}"),
            };
            w.write_record([
                self.sweep_axis.as_str(),
                &format_float(r.sweep_value),
                r.method.as_str(),
                &value,
                &format_float(r.wall_ms),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let header = r.headers().map_err(|e| Error::config("header", e.to_string()))?.clone();
        if header.iter().ne(CSV_HEADER.iter().copied()) {
            return Err(Error::config("header", format!("expected {}", CSV_HEADER.join(","))));
        }
        let mut axis = None;
        let mut rows = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let line = i + 2;
            let rec = rec.map_err(|e| Error::config(format!("line {line}"), e.to_string()))?;
            let a: SweepAxis = rec[0].parse()?;
            if axis.is_some_and(|x| x != a) {
                return Err(Error::config(format!("line {line}"), "mixed sweep axes"));
            }
            axis = Some(a);
            let value = match rec[3].strip_prefix("error:") {
                Some(kind) => RowValue::Error(kind.to_string()),
                None => RowValue::Number(parse_float(&rec[3], line)?),
            };
            rows.push(CurveRow {
                sweep_value: parse_float(&rec[1], line)?,
                method: rec[2].parse()?,
                value,
                wall_ms: parse_float(&rec[4], line)?,
            });
        }
        let sweep_axis = axis.ok_or_else(|| Error::config("rows", "curve has no rows"))?;
        Ok(Self { sweep_axis, rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn method() -> impl Strategy<Value = MethodKind> {
        prop::sample::select(MethodKind::ALL.to_vec())
    }

    fn value() -> impl Strategy<Value = RowValue> {
        prop_oneof![
            any::<f64>().prop_filter("not nan", |v| !v.is_nan()).prop_map(RowValue::Number),
            prop::sample::select(vec!["step", "convergence", "domain"]).prop_map(|k| RowValue::Error(k.into())),
        ]
    }

    proptest! {
        #[test]
        fn csv_round_trips(rows in prop::collection::vec((-1e6f64..1e6, method(), value(), 0.0f64..1e5), 1..20)) {
            let curve = QfiCurve {
                sweep_axis: SweepAxis::H,
                rows: rows
                    .into_iter()
                    .map(|(s, m, v, w)| CurveRow { sweep_value: s, method: m, value: v, wall_ms: w })
                    .collect(),
            };
            prop_assert_eq!(QfiCurve::from_csv(&curve.to_csv()).unwrap(), curve);
        }
    }

    #[test]
    fn emits_expected_layout() {
        let curve = QfiCurve {
            sweep_axis: SweepAxis::N,
            rows: vec![
                CurveRow { sweep_value: 2.0, method: MethodKind::Analytic, value: RowValue::Number(0.1), wall_ms: 0.0 },
                CurveRow {
                    sweep_value: 4.0,
                    method: MethodKind::FdState,
                    value: RowValue::Error("step".into()),
                    wall_ms: 0.0,
                },
            ],
        };
        assert_eq!(
            curve.to_csv(),
            "sweep_axis,sweep_value,method,value,wall_ms\nN,2.0,analytic,0.1,0.0\nN,4.0,fd_state,error:step,0.0\n"
        );
    }

    #[test]
    fn rejects_bad_header() {
        assert!(QfiCurve::from_csv("a,b\n1,2\n").is_err());
    }
}
