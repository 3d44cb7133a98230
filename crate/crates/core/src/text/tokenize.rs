/// Characters that end a clause. A term never spans one of these.
fn is_clause_break(c: char) -> bool {
    matches!(
        c,
        '.' | ',' | ';' | ':' | '!' | '?' | '(' | ')' | '[' | ']' | '{' | '}' | '"' | '“' | '”'
            | '«' | '»' | '|' | '&' | '…'
    )
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '’'
}

/// Splits a title into lowercase clauses of word tokens.
///
/// Words are runs of alphanumeric characters. A hyphen, a period or a comma
/// between two alphanumerics stays inside the word when both sides are digits
/// (`2.0`) or, for hyphens, always (`non-programmers`). A trailing `'s` is
/// split off as its own token; other apostrophes stay intra-word.
pub fn tokenize_clauses(title: &str) -> Vec<Vec<String>> {
    let chars: Vec<char> = title.chars().collect();
    let mut clauses = Vec::new();
    let mut clause: Vec<String> = Vec::new();
    let mut word = String::new();

    let flush_word = |word: &mut String, clause: &mut Vec<String>| {
        if !word.is_empty() {
            clause.push(std::mem::take(word));
        }
    };

    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let prev = if i > 0 { Some(chars[i - 1]) } else { None };
        let next = chars.get(i + 1).copied();
        if c.is_alphanumeric() {
            word.extend(c.to_lowercase());
        } else if c == '-' || c == '‐' {
            let joins = !word.is_empty() && next.is_some_and(|n| n.is_alphanumeric());
            if joins {
                word.push('-');
            } else {
                flush_word(&mut word, &mut clause);
            }
        } else if (c == '.' || c == ',')
            && prev.is_some_and(|p| p.is_ascii_digit())
            && next.is_some_and(|n| n.is_ascii_digit())
            && !word.is_empty()
        {
            word.push(c);
        } else if is_apostrophe(c) && !word.is_empty() && next.is_some_and(|n| n.is_alphanumeric()) {
            let after = chars.get(i + 2).copied();
            let possessive = matches!(next, Some('s') | Some('S'))
                && after.is_none_or(|a| !a.is_alphanumeric());
            if possessive {
                flush_word(&mut word, &mut clause);
                clause.push("'s".to_string());
                i += 2;
                continue;
            }
            word.push('\'');
        } else {
            flush_word(&mut word, &mut clause);
            if is_clause_break(c) && !clause.is_empty() {
                clauses.push(std::mem::take(&mut clause));
            }
        }
        i += 1;
    }
    flush_word(&mut word, &mut clause);
    if !clause.is_empty() {
        clauses.push(clause);
    }
    clauses
}

/// Lowercased word tokens of a title, punctuation removed.
pub fn tokenize_title(title: &str) -> Vec<String> {
    tokenize_clauses(title).into_iter().flatten().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_title() {
        let tokens = tokenize_title(
            "Interactive Support for Non-Programmers: The Relational and Network Approaches",
        );
        assert_eq!(
            tokens,
            [
                "interactive",
                "support",
                "for",
                "non-programmers",
                "the",
                "relational",
                "and",
                "network",
                "approaches"
            ]
        );
    }

    #[test]
    fn empty_and_punctuation() {
        assert!(tokenize_title("").is_empty());
        assert!(tokenize_title("  ?! -- ").is_empty());
        assert_eq!(tokenize_title("A B-Trees!"), ["a", "b-trees"]);
    }

    #[test]
    fn clauses_break_on_punctuation() {
        let clauses = tokenize_clauses("Graph Drawing. Network Analysis, Revisited");
        assert_eq!(clauses.len(), 3);
        assert_eq!(clauses[0], ["graph", "drawing"]);
        assert_eq!(clauses[2], ["revisited"]);
    }

    #[test]
    fn numbers_hyphens_and_possessives() {
        assert_eq!(tokenize_title("Web 2.0 and 3-D"), ["web", "2.0", "and", "3-d"]);
        assert_eq!(tokenize_title("-leading trailing-"), ["leading", "trailing"]);
        assert_eq!(tokenize_title("Moore's Law"), ["moore", "'s", "law"]);
        assert_eq!(tokenize_title("Don't Panic"), ["don't", "panic"]);
        assert_eq!(tokenize_title("ÉCOLE Überblick"), ["école", "überblick"]);
    }
}
