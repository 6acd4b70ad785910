//! Sectioned CSV: each block starts with a `[name]` row followed by its
//! header row.

use std::collections::BTreeMap;

pub struct Report {
    writer: csv::Writer<Vec<u8>>,
}

impl Default for Report {
    fn default() -> Self {
        Report::new()
    }
}

impl Report {
    pub fn new() -> Self {
        Report { writer: csv::WriterBuilder::new().flexible(true).from_writer(Vec::new()) }
    }

    pub fn section(&mut self, name: &str, header: &[&str]) {
        self.row([format!("[{name}]")]);
        self.row(header);
    }

    pub fn row<I, T>(&mut self, fields: I)
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[u8]>,
    {
        self.writer.write_record(fields).expect("writing to memory");
    }

    pub fn finish(self) -> String {
        let bytes = self.writer.into_inner().expect("flush to memory");
        String::from_utf8(bytes).expect("utf-8 fields")
    }
}

/// One parsed block: its header and data rows.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Section {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Section {
    /// Values of the named column.
    pub fn column(&self, name: &str) -> Vec<&str> {
        let Some(idx) = self.header.iter().position(|h| h == name) else { return Vec::new() };
        self.rows.iter().map(|r| r[idx].as_str()).collect()
    }
}

pub fn parse_sections(text: &str) -> Result<BTreeMap<String, Section>, csv::Error> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(text.as_bytes());
    let mut out: BTreeMap<String, Section> = BTreeMap::new();
    let mut current: Option<String> = None;
    let mut expect_header = false;
    for rec in reader.records() {
        let rec = rec?;
        let fields: Vec<String> = rec.iter().map(str::to_string).collect();
        if fields.len() == 1 && fields[0].starts_with('[') && fields[0].ends_with(']') {
            let name = fields[0][1..fields[0].len() - 1].to_string();
            out.entry(name.clone()).or_default();
            current = Some(name);
            expect_header = true;
            continue;
        }
        let Some(name) = &current else { continue };
        let section = out.get_mut(name).expect("inserted");
        if expect_header {
            section.header = fields;
            expect_header = false;
        } else {
            section.rows.push(fields);
        }
    }
    Ok(out)
}

pub fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut r = Report::new();
        r.section("a", &["x", "y"]);
        r.row(["1/2", "3"]);
        r.row(["p q", "x,y"]);
        r.section("b", &["z"]);
        let text = r.finish();
        assert!(text.starts_with("[a]\nx,y\n1/2,3\n"));
        let s = parse_sections(&text).unwrap();
        assert_eq!(s["a"].rows, vec![vec!["1/2", "3"], vec!["p q", "x,y"]]);
        assert_eq!(s["a"].column("y"), vec!["3", "x,y"]);
        assert!(s["b"].rows.is_empty());
    }
}
