//! Term normalization shared by the matcher, the validator and the
//! evaluation reports.

use std::collections::BTreeSet;

/// Tokens ignored when comparing token sets.
pub const STOP_TOKENS: [&str; 7] = ["a", "an", "the", "of", "to", "and", "or"];

/// Normalizes a free-text term or a concept label into tokens.
///
/// Pipeline: split CamelCase at case boundaries, lowercase, strip
/// punctuation, collapse whitespace, singularize each token, drop empties.
/// Apostrophes are deleted (`don't` -> `dont`); every other non-alphanumeric
/// character separates tokens.
pub fn normalize_term(text: &str) -> Vec<String> {
    let lowered = split_camel_case(text).to_lowercase();
    let cleaned: String = lowered
        .chars()
        .filter(|c| !matches!(c, '\'' | '\u{2019}' | '\u{2018}'))
        .map(|c| if c.is_alphanumeric() { c } else { ' ' })
        .collect();
    cleaned
        .split_whitespace()
        .map(singularize)
        .filter(|t| !t.is_empty())
        .collect()
}

/// Normalized tokens with [`STOP_TOKENS`] removed, as a set.
pub fn content_tokens(text: &str) -> BTreeSet<String> {
    normalize_term(text)
        .into_iter()
        .filter(|t| !is_stop_token(t))
        .collect()
}

pub fn is_stop_token(token: &str) -> bool {
    STOP_TOKENS.contains(&token)
}

/// The normalized form joined by single spaces; used as a dedup key.
pub fn normalized_key(text: &str) -> String {
    normalize_term(text).join(" ")
}

fn split_camel_case(text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len() + 8);
    for (i, &c) in chars.iter().enumerate() {
        if i > 0 && c.is_uppercase() {
            let prev = chars[i - 1];
            let next_is_lower = chars.get(i + 1).is_some_and(|n| n.is_lowercase());
            if prev.is_lowercase()
                || prev.is_ascii_digit()
                || (prev.is_uppercase() && next_is_lower)
            {
                out.push(' ');
            }
        }
        out.push(c);
    }
    out
}

/// Suffix-rule singularization, applied in order; tokens shorter than four
/// characters are left alone.
fn singularize(token: &str) -> String {
    if token.chars().count() < 4 {
        return token.to_string();
    }
    if let Some(stem) = token.strip_suffix("ies") {
        return format!("{stem}y");
    }
    if token.ends_with("sses") {
        return token[..token.len() - 2].to_string();
    }
    // headaches, backaches: the singular already ends in "e"
    if token.ends_with("aches") {
        return token[..token.len() - 1].to_string();
    }
    if token.ends_with("xes") || token.ends_with("ches") || token.ends_with("shes") {
        return token[..token.len() - 2].to_string();
    }
    // "ss" (stress), "us" (nervous) and "is" (analysis) are not plural endings
    if token.ends_with("ss") || token.ends_with("us") || token.ends_with("is") {
        return token.to_string();
    }
    if let Some(stem) = token.strip_suffix('s') {
        return stem.to_string();
    }
    token.to_string()
}
