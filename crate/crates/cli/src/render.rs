use serde::Serialize;
use serde_json::json;

use ramify::Error;

use crate::Output;

/// Rows of strings under a header, printed either aligned or as CSV.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn row<S: AsRef<str>, const N: usize>(&mut self, cells: [S; N]) {
        self.rows.push(cells.iter().map(|c| c.as_ref().to_string()).collect());
    }

    fn aligned(&self) -> String {
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> =
                cells.iter().zip(&widths).map(|(c, &w)| format!("{c}{}", " ".repeat(w - c.chars().count()))).collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        let mut out = line(&self.header);
        out += &line(&widths.iter().map(|&w| "-".repeat(w)).collect::<Vec<_>>());
        for r in &self.rows {
            out += &line(r);
        }
        out
    }

    fn csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("writing to memory");
        for r in &self.rows {
            w.write_record(r).expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv output is UTF-8")
    }
}

pub trait ToJson {
    fn to_json(&self) -> String;
}

impl<T: Serialize> ToJson for T {
    fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize") + "\n"
    }
}

/// A command's result document.
pub trait Document: ToJson {
    /// The human-readable view.
    fn table(&self) -> Table;
    fn csv(&self) -> Table;
    /// Whether the command succeeded; a failed self-test exits nonzero.
    fn passed(&self) -> bool {
        true
    }
}

impl dyn Document {
    pub fn render(&self, output: Output) -> String {
        match output {
            Output::Json => self.to_json(),
            Output::Table => self.table().aligned(),
            Output::Csv => self.csv().csv(),
        }
    }
}

pub fn error_document(command: &str, err: &Error) -> String {
    let doc = json!({
        "command": command,
        "error": { "kind": err.kind(), "message": err.to_string() },
    });
    serde_json::to_string_pretty(&doc).expect("documents serialize")
}
