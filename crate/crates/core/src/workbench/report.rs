use serde_json::{json, Map, Value};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Output of one command: human-readable lines plus a JSON mirror.
///
/// Machine schema (keys sorted):
/// `{ "command", "data": {..}, "error": string|null, "exit_code", "manifold",
///    "verdicts": [{ "detail", "name", "passed" }] }`.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub command: String,
    pub manifold: Option<String>,
    pub lines: Vec<String>,
    pub verdicts: Vec<Verdict>,
    pub data: Map<String, Value>,
    pub error: Option<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report { command: command.into(), ..Default::default() }
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    pub fn verdict(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        let detail = detail.into();
        self.lines.push(format!("[{}] {name}: {detail}", if passed { "ok" } else { "FAIL" }));
        self.verdicts.push(Verdict { name: name.into(), passed, detail });
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.data.insert(key.into(), value.into());
    }

    pub fn fail_input(mut self, message: impl Into<String>) -> Self {
        let m = message.into();
        self.lines.push(format!("error: {m}"));
        self.error = Some(m);
        self
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    /// 0 when every verdict holds, 1 when one fails, 2 on input errors.
    pub fn exit_code(&self) -> i32 {
        if self.error.is_some() {
            2
        } else if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn verdict_named(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    pub fn human(&self) -> String {
        let mut s = String::new();
        for l in &self.lines {
            s.push_str(l);
            s.push('\n');
        }
        s
    }

    pub fn machine(&self) -> Value {
        let verdicts: Vec<Value> =
            self.verdicts.iter().map(|v| json!({ "name": v.name, "passed": v.passed, "detail": v.detail })).collect();
        json!({
            "command": self.command,
            "manifold": self.manifold,
            "verdicts": verdicts,
            "data": Value::Object(self.data.clone()),
            "error": self.error,
            "exit_code": self.exit_code(),
        })
    }

    pub fn machine_text(&self) -> String {
        serde_json::to_string_pretty(&self.machine()).expect("JSON values serialize")
    }
}
