//! CSV helpers shared by every tabular output.

use crate::Result;
use serde::Serialize;

/// Serializes `rows` to CSV with a header row taken from the field names.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| std::io::Error::other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Like [`to_csv`], but writes the header even when `rows` is empty.
pub fn to_csv_with_header<T: Serialize>(header: &[&str], rows: &[T]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| std::io::Error::other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        vertex: String,
        value: f64,
    }

    #[test]
    fn quotes_fields_with_commas() {
        let s = to_csv(&[Row {
            vertex: "(1,2)".into(),
            value: 0.5,
        }])
        .unwrap();
        assert_eq!(s, "vertex,value\n\"(1,2)\",0.5\n");
        let empty: Vec<Row> = Vec::new();
        assert_eq!(
            to_csv_with_header(&["vertex", "value"], &empty).unwrap(),
            "vertex,value\n"
        );
    }
}
