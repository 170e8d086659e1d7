use clap::ValueEnum;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// A finished command: its verdict and the same data in every output format.
#[derive(Debug)]
pub struct Report {
    pub passed: bool,
    pub text: String,
    pub json: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text.clone(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("JSON values serialize");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.header).expect("in-memory write");
                for row in &self.rows {
                    w.write_record(row).expect("in-memory write");
                }
                String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV of UTF-8 fields")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn sample() -> Report {
        Report {
            passed: true,
            text: "hello\n".into(),
            json: json!({"b": 1, "a": [1, 2]}),
            header: vec!["x", "y"],
            rows: vec![vec!["1".into(), "a,b".into()]],
        }
    }

    #[test]
    fn formats() {
        let r = sample();
        assert_eq!(r.render(Format::Text), "hello\n");
        let parsed: Value = serde_json::from_str(&r.render(Format::Json)).unwrap();
        assert_eq!(parsed, r.json);
        assert_eq!(r.render(Format::Csv), "x,y\n1,\"a,b\"\n");
    }

    #[test]
    fn json_keys_are_sorted() {
        let s = sample().render(Format::Json);
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
    }
}
