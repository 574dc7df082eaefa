//! Variable names and the deterministic fresh-name supply.

use std::sync::atomic::{AtomicU64, Ordering};

/// Reserved μ-constant: `#delta` may occur free (as a μ-variable leaf or as a
/// λμ naming) but can never be bound by `mu`.
pub const DELTA: &str = "delta";

static COUNTER: AtomicU64 = AtomicU64::new(0);

/// Strip a `$n` suffix so refreshed names stay readable (`x$3` refreshes to
/// `x$7`, not `x$3$7`).
fn stem(base: &str) -> &str {
    match base.rfind('$') {
        Some(i) if i > 0 && base[i + 1..].chars().all(|c| c.is_ascii_digit()) => &base[..i],
        _ => base,
    }
}

/// Next name `stem$n` that `taken` does not reject.
///
/// The counter is process-global, so within a single-threaded run every trace
/// and reduction graph is reproducible. Callers must pass a `taken` predicate
/// covering the free variables in scope; uniqueness of the counter alone is
/// not enough because parsed input may itself contain `$n`-suffixed names.
pub fn fresh(base: &str, taken: impl Fn(&str) -> bool) -> String {
    let s = stem(base);
    loop {
        let n = COUNTER.fetch_add(1, Ordering::Relaxed);
        let cand = format!("{s}${n}");
        if !taken(&cand) {
            return cand;
        }
    }
}

/// True if `name` is lexically valid as an identifier: lowercase start,
/// then letters, digits, `_` or `$`. Names starting with `$` are reserved
/// for canonical forms and cannot be written in source.
pub fn valid_ident(name: &str) -> bool {
    let mut cs = name.chars();
    match cs.next() {
        Some(c) if c.is_ascii_lowercase() => cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '$'),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_strips_suffix_and_avoids_taken() {
        let avoid = ["x$0", "x$1", "x$2"];
        let got = fresh("x$1", |c| avoid.contains(&c));
        assert!(got.starts_with("x$"));
        assert!(!avoid.contains(&got.as_str()));
        assert!(!got.contains("$1$"), "stem stripping failed: {got}");
    }

    #[test]
    fn idents() {
        assert!(valid_ident("x"));
        assert!(valid_ident("foo_1$3"));
        assert!(!valid_ident("$l0"));
        assert!(!valid_ident("X"));
        assert!(!valid_ident(""));
    }
}
