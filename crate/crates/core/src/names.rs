//! Atom name syntax and the fresh-name scheme used by the transformations.
//!
//! Counterfactual copies put `__cf` after the predicate symbol (`c__cf`,
//! `r__cf(v3)`), fixed atoms put `fixed__` in front of it (`fixed__b`,
//! `fixed__r(v3)`). Both stay inside the atom grammar so transformed
//! programs can be printed and parsed back.

pub const PRIME_SUFFIX: &str = "__cf";
pub const FIXED_PREFIX: &str = "fixed__";

fn is_ident(s: &str) -> bool {
    let mut bytes = s.bytes();
    matches!(bytes.next(), Some(b'a'..=b'z'))
        && bytes.all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

/// Strips whitespace and checks `ident ( '(' ident (',' ident)* ')' )?`.
pub fn canonical_atom(raw: &str) -> Option<String> {
    let s: String = raw.chars().filter(|c| !c.is_whitespace()).collect();
    let ok = match s.find('(') {
        None => is_ident(&s),
        Some(open) => {
            s.ends_with(')')
                && is_ident(&s[..open])
                && s[open + 1..s.len() - 1].split(',').all(is_ident)
        }
    };
    ok.then_some(s)
}

/// The predicate symbol of an atom name (`r` for `r(v1)`).
pub fn predicate(name: &str) -> &str {
    name.split_once('(').map_or(name, |(p, _)| p)
}

fn with_predicate(name: &str, f: impl FnOnce(&str) -> String) -> String {
    match name.split_once('(') {
        Some((p, args)) => format!("{}({args}", f(p)),
        None => f(name),
    }
}

/// Name of the counterfactual copy of `name`.
pub fn primed(name: &str) -> String {
    with_predicate(name, |p| format!("{p}{PRIME_SUFFIX}"))
}

/// Name of the fixed-value atom standing in for `name` after an intervention.
pub fn fixed(name: &str) -> String {
    with_predicate(name, |p| format!("{FIXED_PREFIX}{p}"))
}

/// Inverse of [`primed`], if `name` is a counterfactual copy.
pub fn unprimed(name: &str) -> Option<String> {
    let p = predicate(name);
    let base = p.strip_suffix(PRIME_SUFFIX)?;
    Some(format!("{base}{}", &name[p.len()..]))
}

pub fn is_reserved(name: &str) -> bool {
    let p = predicate(name);
    p.starts_with(FIXED_PREFIX) || p.ends_with(PRIME_SUFFIX)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonicalizes_compound_terms() {
        assert_eq!(canonical_atom(" r( v3 , u1 ) ").as_deref(), Some("r(v3,u1)"));
        assert_eq!(canonical_atom("smokes").as_deref(), Some("smokes"));
        assert!(canonical_atom("Smokes").is_none());
        assert!(canonical_atom("r()").is_none());
        assert!(canonical_atom("r(a").is_none());
        assert!(canonical_atom("r(a)(b)").is_none());
        assert!(canonical_atom("1a").is_none());
    }

    #[test]
    fn fresh_names_stay_in_the_grammar() {
        for n in ["c", "r(v3)", "p(s,v1)"] {
            assert!(canonical_atom(&primed(n)).is_some());
            assert!(canonical_atom(&fixed(n)).is_some());
            assert!(is_reserved(&primed(n)));
            assert!(is_reserved(&fixed(n)));
            assert!(!is_reserved(n));
            assert_eq!(unprimed(&primed(n)).as_deref(), Some(n));
        }
        assert_eq!(primed("r(v3)"), "r__cf(v3)");
        assert_eq!(fixed("b"), "fixed__b");
        assert_eq!(unprimed("c"), None);
    }
}
