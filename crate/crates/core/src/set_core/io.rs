use std::fmt::Write as _;

use super::point::Point;
use super::set::CompactSet;
use crate::error::{Error, Result};

/// Whitespace-separated text, one point per line.
///
/// Coordinates use Rust's shortest round-trip formatting, so reading the
/// output back reproduces every double bit for bit.
pub fn write_text(set: &CompactSet) -> String {
    let mut out = String::new();
    for p in set.iter() {
        for (k, x) in p.iter().enumerate() {
            if k > 0 {
                out.push(' ');
            }
            write!(out, "{x:?}").expect("writing to a String cannot fail");
        }
        out.push('\n');
    }
    out
}

/// Parses the text format. Blank lines and lines starting with `#` are skipped.
pub fn read_text(text: &str) -> Result<CompactSet> {
    let mut points = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let coords = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: `{tok}`: {e}", lineno + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        points.push(Point::new(coords)?);
    }
    CompactSet::new(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn text_layout() {
        let s = CompactSet::from_rows(&[[1.5, -2.0], [0.1, 3.0]]).unwrap();
        assert_eq!(write_text(&s), "0.1 3.0\n1.5 -2.0\n");
        let parsed = read_text("# comment\n1.5 -2\n\n0.1   3\n").unwrap();
        assert_eq!(parsed, s);
    }

    #[test]
    fn text_errors() {
        assert!(matches!(read_text("1 2\nx 3\n"), Err(Error::Parse(_))));
        assert!(matches!(
            read_text("1 2\n3\n"),
            Err(Error::DimensionMismatch { .. })
        ));
        assert_eq!(read_text("\n# nothing\n"), Err(Error::EmptySet));
    }

    fn bits(s: &CompactSet) -> Vec<u64> {
        s.iter().flatten().map(|x| x.to_bits()).collect()
    }

    proptest! {
        #[test]
        fn both_formats_round_trip_bit_exactly(
            rows in prop::collection::vec(prop::collection::vec(-1e300f64..1e300, 3), 1..20)
        ) {
            let s = CompactSet::from_rows(&rows).unwrap();
            let from_text = read_text(&write_text(&s)).unwrap();
            prop_assert_eq!(bits(&from_text), bits(&s));
            let json = serde_json::to_string(&s).unwrap();
            let from_json: CompactSet = serde_json::from_str(&json).unwrap();
            prop_assert_eq!(bits(&from_json), bits(&s));
        }
    }
}
