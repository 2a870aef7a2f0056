//! Deterministic reports: a command echo, ordered key/value facts and
//! pass/fail verdicts, rendered as plain text or a json-like document.
//! Identical inputs and seeds produce byte-identical output.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Debug)]
enum Item {
    Fact(String, String),
    Verdict(String, bool),
}

#[derive(Clone, Debug)]
pub struct Report {
    command: String,
    seed: Option<u64>,
    items: Vec<Item>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report {
            command: command.into(),
            seed: None,
            items: Vec::new(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn fact(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.items.push(Item::Fact(key.into(), value.into()));
    }

    pub fn verdict(&mut self, key: impl Into<String>, pass: bool) {
        self.items.push(Item::Verdict(key.into(), pass));
    }

    pub fn all_passed(&self) -> bool {
        self.items.iter().all(|i| match i {
            Item::Verdict(_, v) => *v,
            Item::Fact(..) => true,
        })
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.render_text(),
            Format::Json => self.render_json(),
        }
    }

    fn render_text(&self) -> String {
        let mut out = format!("command: {}\n", self.command);
        if let Some(seed) = self.seed {
            out.push_str(&format!("seed: {seed}\n"));
        }
        for item in &self.items {
            match item {
                Item::Fact(k, v) => out.push_str(&format!("{k}: {v}\n")),
                Item::Verdict(k, v) => {
                    out.push_str(&format!("{k}: {}\n", if *v { "PASS" } else { "FAIL" }))
                }
            }
        }
        out.push_str(&format!(
            "result: {}\n",
            if self.all_passed() { "PASS" } else { "FAIL" }
        ));
        out
    }

    fn render_json(&self) -> String {
        let mut out = String::from("{\n");
        out.push_str(&format!("  \"command\": {},\n", json_string(&self.command)));
        if let Some(seed) = self.seed {
            out.push_str(&format!("  \"seed\": {seed},\n"));
        }
        out.push_str("  \"items\": [\n");
        for (i, item) in self.items.iter().enumerate() {
            let comma = if i + 1 == self.items.len() { "" } else { "," };
            match item {
                Item::Fact(k, v) => out.push_str(&format!(
                    "    {{\"key\": {}, \"value\": {}}}{comma}\n",
                    json_string(k),
                    json_string(v)
                )),
                Item::Verdict(k, v) => out.push_str(&format!(
                    "    {{\"key\": {}, \"pass\": {v}}}{comma}\n",
                    json_string(k)
                )),
            }
        }
        out.push_str("  ],\n");
        out.push_str(&format!("  \"result\": {}\n", self.all_passed()));
        out.push_str("}\n");
        out
    }
}

fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rendering_is_deterministic() {
        let mut r = Report::new("check assoc demo.alg").with_seed(42);
        r.fact("entries", "8");
        r.verdict("assoc", true);
        assert_eq!(r.render(Format::Text), r.render(Format::Text));
        assert!(r.all_passed());
        let json = r.render(Format::Json);
        assert!(json.contains("\"seed\": 42"));
        assert!(json.contains("\"pass\": true"));
    }

    #[test]
    fn failed_verdict_fails_report() {
        let mut r = Report::new("x");
        r.verdict("ok", true);
        r.verdict("bad", false);
        assert!(!r.all_passed());
        assert!(r.render(Format::Text).contains("result: FAIL"));
    }
}
