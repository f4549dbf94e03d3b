//! Name patterns used in configuration: `*` matches any run of characters
//! (dots included), `?` matches exactly one.

pub fn glob_match(pattern: &str, text: &str) -> bool {
    let p: Vec<char> = pattern.chars().collect();
    let t: Vec<char> = text.chars().collect();
    let (mut pi, mut ti) = (0, 0);
    let mut star: Option<(usize, usize)> = None;
    while ti < t.len() {
        if pi < p.len() && (p[pi] == '?' || p[pi] == t[ti]) {
            pi += 1;
            ti += 1;
        } else if pi < p.len() && p[pi] == '*' {
            star = Some((pi, ti));
            pi += 1;
        } else if let Some((sp, st)) = star {
            pi = sp + 1;
            ti = st + 1;
            star = Some((sp, st + 1));
        } else {
            return false;
        }
    }
    p[pi..].iter().all(|&c| c == '*')
}

/// Matches a type-name pattern against a qualified name. Patterns without a
/// dot are compared with the simple name only.
pub fn type_name_matches(pattern: &str, qualified: &str) -> bool {
    if pattern.contains('.') {
        glob_match(pattern, qualified)
    } else {
        glob_match(pattern, crate::codemodel::simple_name(qualified))
    }
}
