//! Reader and writer for the dataset text format:
//!
//! ```text
//! @problemName <token>
//! @dimensions <d>
//! @seriesLength <m>
//! @classLabel true <label1> ... <labelc>
//! @data
//! v1,...,vm:v1,...,vm:<label>
//! ```
//!
//! `#` lines are comments. CRLF is accepted on read; LF is always written.

use std::io::Write;
use std::path::Path;

use super::{Dataset, MultivariateInstance, TimeSeries};
use crate::error::{Error, Result};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

#[derive(Default)]
struct Header {
    name: Option<String>,
    dims: Option<usize>,
    length: Option<usize>,
    classes: Option<Vec<String>>,
}

fn set_once<T>(slot: &mut Option<T>, value: T, key: &str, line: usize) -> Result<()> {
    if slot.is_some() {
        return Err(parse_err(line, format!("duplicate header key @{key}")));
    }
    *slot = Some(value);
    Ok(())
}

fn parse_count(value: &str, key: &str, line: usize) -> Result<usize> {
    match value.parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => Err(parse_err(
            line,
            format!("@{key} expects a positive integer, got {value:?}"),
        )),
    }
}

fn parse_flag(value: &str, key: &str, line: usize) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(parse_err(line, format!("@{key} expects true or false, got {value:?}"))),
    }
}

/// Parses a dataset from text.
pub fn parse_dataset(text: &str) -> Result<Dataset> {
    let mut header = Header::default();
    let mut in_data = false;
    let mut instances = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.split('\n').enumerate() {
        let lineno = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw).trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        last_line = lineno;

        if !in_data {
            let Some(body) = line.strip_prefix('@') else {
                return Err(parse_err(lineno, "expected a header line starting with '@'"));
            };
            let mut parts = body.split_whitespace();
            let key = parts.next().unwrap_or_default();
            let rest: Vec<&str> = parts.collect();
            let single = |rest: &[&str]| -> Result<String> {
                match rest {
                    [v] => Ok(v.to_string()),
                    _ => Err(parse_err(lineno, format!("@{key} expects exactly one value"))),
                }
            };
            match key.to_ascii_lowercase().as_str() {
                "problemname" => set_once(&mut header.name, single(&rest)?, key, lineno)?,
                "dimensions" => {
                    let v = parse_count(&single(&rest)?, key, lineno)?;
                    set_once(&mut header.dims, v, key, lineno)?
                }
                "serieslength" => {
                    let v = parse_count(&single(&rest)?, key, lineno)?;
                    set_once(&mut header.length, v, key, lineno)?
                }
                "classlabel" => {
                    let Some((flag, labels)) = rest.split_first() else {
                        return Err(parse_err(lineno, "@classLabel expects 'true' and a label list"));
                    };
                    if !parse_flag(flag, key, lineno)? {
                        return Err(parse_err(lineno, "unlabelled data is not supported"));
                    }
                    if labels.is_empty() {
                        return Err(parse_err(lineno, "@classLabel lists no labels"));
                    }
                    let mut classes: Vec<String> = Vec::with_capacity(labels.len());
                    for l in labels {
                        if classes.iter().any(|c| c == l) {
                            return Err(parse_err(lineno, format!("class label {l:?} listed twice")));
                        }
                        classes.push(l.to_string());
                    }
                    set_once(&mut header.classes, classes, key, lineno)?
                }
                // Accepted for compatibility with the UEA archive headers, as
                // long as they describe rectangular, complete data.
                "univariate" => {
                    parse_flag(&single(&rest)?, key, lineno)?;
                }
                "equallength" => {
                    if !parse_flag(&single(&rest)?, key, lineno)? {
                        return Err(parse_err(lineno, "variable-length series are not supported"));
                    }
                }
                "missing" => {
                    if parse_flag(&single(&rest)?, key, lineno)? {
                        return Err(parse_err(lineno, "missing values are not supported"));
                    }
                }
                "timestamps" => {
                    if parse_flag(&single(&rest)?, key, lineno)? {
                        return Err(parse_err(lineno, "timestamped series are not supported"));
                    }
                }
                "data" => {
                    if !rest.is_empty() {
                        return Err(parse_err(lineno, "@data takes no value"));
                    }
                    let missing: Vec<&str> = [
                        ("@problemName", header.name.is_none()),
                        ("@dimensions", header.dims.is_none()),
                        ("@seriesLength", header.length.is_none()),
                        ("@classLabel", header.classes.is_none()),
                    ]
                    .into_iter()
                    .filter_map(|(k, absent)| absent.then_some(k))
                    .collect();
                    if !missing.is_empty() {
                        return Err(parse_err(
                            lineno,
                            format!("missing header key(s) {}", missing.join(", ")),
                        ));
                    }
                    in_data = true;
                }
                _ => return Err(parse_err(lineno, format!("unknown header key @{key}"))),
            }
            continue;
        }

        let d = header.dims.unwrap_or_default();
        let m = header.length.unwrap_or_default();
        let classes = header.classes.as_deref().unwrap_or_default();
        let blocks: Vec<&str> = line.split(':').collect();
        if blocks.len() != d + 1 {
            return Err(parse_err(
                lineno,
                format!(
                    "expected {d} dimension block(s) and a label, found {} field(s)",
                    blocks.len()
                ),
            ));
        }
        let label = blocks[d].trim();
        if !classes.iter().any(|c| c == label) {
            return Err(parse_err(lineno, format!("unknown class label {label:?}")));
        }
        let mut dims = Vec::with_capacity(d);
        for (j, block) in blocks[..d].iter().enumerate() {
            let values = block
                .split(',')
                .map(|tok| {
                    let tok = tok.trim();
                    match tok.parse::<f64>() {
                        Ok(v) if v.is_finite() => Ok(v),
                        _ => Err(parse_err(lineno, format!("dimension {j}: invalid number {tok:?}"))),
                    }
                })
                .collect::<Result<Vec<f64>>>()?;
            if values.len() != m {
                return Err(parse_err(
                    lineno,
                    format!("dimension {j} has {} value(s), expected {m}", values.len()),
                ));
            }
            dims.push(TimeSeries::new(values).map_err(|e| parse_err(lineno, e.to_string()))?);
        }
        instances.push(MultivariateInstance::new(dims, label).map_err(|e| parse_err(lineno, e.to_string()))?);
    }

    if !in_data {
        return Err(parse_err(last_line.max(1), "no @data section"));
    }
    if instances.is_empty() {
        return Err(parse_err(last_line.max(1), "@data section holds no instances"));
    }
    let name = header.name.unwrap_or_default();
    Dataset::new(name, instances, header.classes.unwrap_or_default()).map_err(|e| parse_err(last_line, e.to_string()))
}

pub fn read_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)?;
    parse_dataset(&text)
}

/// Formats a sample with at most six significant digits.
pub fn format_sample(v: f64) -> String {
    let rounded: f64 = format!("{v:.5e}").parse().unwrap_or(v);
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    let mag = rounded.abs();
    if mag == 0.0 || (1e-5..1e15).contains(&mag) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

fn check_token(token: &str, what: &str) -> Result<()> {
    if token.is_empty() || token.contains(|c: char| c.is_whitespace() || c == ':' || c == ',' || c == '#') {
        return Err(Error::InvalidData(format!(
            "{what} {token:?} cannot be written: it must be non-empty without whitespace, ':', ',' or '#'"
        )));
    }
    Ok(())
}

/// Writes `dataset`, preceded by one `# ` comment line per entry of `comments`.
pub fn write_dataset<W: Write>(out: &mut W, dataset: &Dataset, comments: &[String]) -> Result<()> {
    check_token(dataset.name(), "problem name")?;
    for c in dataset.classes() {
        check_token(c, "class label")?;
    }
    for c in comments {
        for line in c.lines() {
            writeln!(out, "# {line}")?;
        }
    }
    writeln!(out, "@problemName {}", dataset.name())?;
    writeln!(out, "@dimensions {}", dataset.n_dims())?;
    writeln!(out, "@seriesLength {}", dataset.series_length())?;
    writeln!(out, "@classLabel true {}", dataset.classes().join(" "))?;
    writeln!(out, "@data")?;
    let mut line = String::new();
    for inst in dataset.instances() {
        line.clear();
        for series in inst.dims() {
            for (i, &v) in series.iter().enumerate() {
                if i > 0 {
                    line.push(',');
                }
                line.push_str(&format_sample(v));
            }
            line.push(':');
        }
        line.push_str(inst.label());
        writeln!(out, "{line}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SAMPLE: &str = "# generated\n@problemName Toy\n@dimensions 2\n@seriesLength 3\n@classLabel true a b\n@data\n1,2,3:4,5,6:a\r\n0.5,-1e-3,2:7,8,9:b\n";

    #[test]
    fn parses_sample() {
        let ds = parse_dataset(SAMPLE).unwrap();
        assert_eq!(ds.name(), "Toy");
        assert_eq!((ds.n_instances(), ds.n_dims(), ds.series_length()), (2, 2, 3));
        assert_eq!(ds.classes(), &["a".to_string(), "b".to_string()]);
        assert_eq!(ds.instance(1).dim(0).values(), &[0.5, -1e-3, 2.0]);
        assert_eq!(ds.instance(1).label(), "b");
    }

    fn err_line(text: &str) -> (usize, String) {
        match parse_dataset(text).unwrap_err() {
            Error::Parse { line, message } => (line, message),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn reports_errors_with_line_numbers() {
        let dup = SAMPLE.replace("@dimensions 2\n", "@dimensions 2\n@dimensions 2\n");
        assert_eq!(err_line(&dup).0, 4);
        let missing = SAMPLE.replace("@seriesLength 3\n", "");
        let (line, msg) = err_line(&missing);
        assert_eq!(line, 5);
        assert!(msg.contains("@seriesLength"), "{msg}");
        let short = SAMPLE.replace("1,2,3:4,5,6:a", "1,2:4,5,6:a");
        assert_eq!(err_line(&short).0, 7);
        let dims = SAMPLE.replace("1,2,3:4,5,6:a", "1,2,3:a");
        assert_eq!(err_line(&dims).0, 7);
        let label = SAMPLE.replace("7,8,9:b", "7,8,9:z");
        let (line, msg) = err_line(&label);
        assert_eq!(line, 8);
        assert!(msg.contains("unknown class label"));
        let nan = SAMPLE.replace("0.5,", "NaN,");
        assert_eq!(err_line(&nan).0, 8);
        let unknown = SAMPLE.replace("@data", "@weird 1\n@data");
        assert_eq!(err_line(&unknown).0, 6);
        let variable = SAMPLE.replace("@data", "@equalLength false\n@data");
        assert!(err_line(&variable).1.contains("variable-length"));
        assert!(parse_dataset("@problemName x\n").is_err());
    }

    #[test]
    fn sample_formatting() {
        assert_eq!(format_sample(1.0), "1");
        assert_eq!(format_sample(-0.0), "0");
        assert_eq!(format_sample(1.23456789), "1.23457");
        assert_eq!(format_sample(-0.000123456789), "-0.000123457");
        assert_eq!(format_sample(1.234567e20), "1.23457e20");
        assert_eq!(format_sample(2.5e-9), "2.5e-9");
    }

    #[test]
    fn writer_rejects_unwritable_tokens() {
        let inst = MultivariateInstance::from_values(vec![vec![1.0]], "has space").unwrap();
        let ds = Dataset::from_instances("x", vec![inst]).unwrap();
        assert!(write_dataset(&mut Vec::new(), &ds, &[]).is_err());
    }

    proptest! {
        #[test]
        fn write_then_parse_matches_six_digit_rounding(
            rows in proptest::collection::vec(
                (proptest::collection::vec(-1e4f64..1e4, 8), 0usize..3), 1..6)
        ) {
            let labels = ["x", "y", "z"];
            let instances: Vec<_> = rows
                .iter()
                .map(|(v, l)| {
                    MultivariateInstance::from_values(vec![v[..4].to_vec(), v[4..].to_vec()], labels[*l]).unwrap()
                })
                .collect();
            let ds = Dataset::new("P", instances, labels.iter().map(|s| s.to_string()).collect()).unwrap();
            let mut buf = Vec::new();
            write_dataset(&mut buf, &ds, &["manifest {}".into()]).unwrap();
            let text = String::from_utf8(buf).unwrap();
            prop_assert!(!text.contains('\r'));
            let back = parse_dataset(&text).unwrap();
            prop_assert_eq!(back.classes(), ds.classes());
            for (a, b) in ds.instances().iter().zip(back.instances()) {
                prop_assert_eq!(a.label(), b.label());
                for (sa, sb) in a.dims().iter().zip(b.dims()) {
                    for (x, y) in sa.iter().zip(sb.iter()) {
                        prop_assert!((x - y).abs() <= 5e-6 * x.abs().max(1e-300));
                    }
                }
            }
        }
    }
}
