//! PASS/FAIL reporting for the acceptance target in `tests/acceptance.rs`.
//!
//! The acceptance criteria live in their own package so that `cargo test
//! --workspace` runs every other test target before them.

/// `Ok` and `Err` both carry the measured values.
pub type Outcome = Result<String, String>;

pub fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

#[derive(Debug, Default)]
pub struct Report {
    failed: Vec<&'static str>,
}

impl Report {
    /// A criterion that fails the run.
    pub fn gate(&mut self, name: &'static str, outcome: Outcome) {
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                println!("FAIL  {name}: {detail}");
                self.failed.push(name);
            }
        }
    }

    /// A criterion that is reported only.
    pub fn soft(&mut self, name: &'static str, outcome: Outcome) {
        match outcome {
            Ok(detail) => println!("PASS  {name} [soft]: {detail}"),
            Err(detail) => println!("FAIL  {name} [soft, non-gating]: {detail}"),
        }
    }

    pub fn failed(&self) -> &[&'static str] {
        &self.failed
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn only_gates_count() {
        let mut r = Report::default();
        r.gate("a", check(true, String::new()));
        r.soft("b", check(false, String::new()));
        r.gate("c", check(false, String::new()));
        assert_eq!(r.failed(), ["c"]);
    }
}
