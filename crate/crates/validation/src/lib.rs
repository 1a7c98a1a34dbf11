//! Verdict bookkeeping for the acceptance run in `tests/acceptance.rs`.

use std::fmt;
use std::panic::{catch_unwind, UnwindSafe};
use std::time::Instant;

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:>2} {}: {} [{:.2}s]",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.seconds
        )
    }
}

/// Collects sub-check outcomes of one criterion.
#[derive(Debug, Default)]
pub struct Checks {
    parts: Vec<(bool, String)>,
}

impl Checks {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn check(&mut self, ok: bool, what: impl Into<String>) -> bool {
        self.parts.push((ok, what.into()));
        ok
    }

    /// A reported figure that does not gate the verdict.
    pub fn info(&mut self, what: impl Into<String>) {
        self.parts.push((true, format!("info {}", what.into())));
    }

    pub fn pass(&self) -> bool {
        self.parts.iter().all(|p| p.0)
    }

    /// Failed parts first, then the rest.
    pub fn detail(&self) -> String {
        let mut v: Vec<String> = self
            .parts
            .iter()
            .filter(|p| !p.0)
            .map(|p| format!("FAILED {}", p.1))
            .collect();
        v.extend(self.parts.iter().filter(|p| p.0).map(|p| p.1.clone()));
        v.join("; ")
    }
}

/// Runs one criterion; a panic counts as failure.
pub fn run<F>(id: u32, name: &'static str, f: F) -> Verdict
where
    F: FnOnce() -> Checks + UnwindSafe,
{
    let t = Instant::now();
    let (pass, detail) = match catch_unwind(f) {
        Ok(c) => (c.pass(), c.detail()),
        Err(e) => {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            (false, format!("panicked: {msg}"))
        }
    };
    Verdict {
        id,
        name,
        pass,
        detail,
        seconds: t.elapsed().as_secs_f64(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failures_are_listed_first() {
        let mut c = Checks::new();
        c.check(true, "a");
        c.check(false, "b");
        assert!(!c.pass());
        assert_eq!(c.detail(), "FAILED b; a");
    }

    #[test]
    fn panics_fail() {
        let v = run(1, "x", || panic!("boom"));
        assert!(!v.pass);
        assert!(v.detail.contains("boom"));
        assert!(v.to_string().starts_with("FAIL  1 x"));
    }
}
