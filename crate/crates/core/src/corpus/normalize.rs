use std::sync::LazyLock;

use regex::Regex;

use super::emoji::is_emoji;

static URL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)(?:\b(?:https?|ftp)://|\bwww\.)\S*").unwrap());
static MENTION_OR_HASHTAG: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"[@#]\w+").unwrap());
static RETWEET: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\bRT\b").unwrap());

/// Clean a raw comment for tokenization.
///
/// Steps, applied until the text stops changing:
/// URLs become a space; mentions, hashtags and `RT` markers are deleted;
/// runs of three or more single letters separated by spaces or dots are
/// merged into one word; every character other than letters, digits, emoji,
/// `!` and whitespace is dropped (apostrophes) or turned into a space;
/// letter runs of three or more collapse to one letter; whitespace collapses.
pub fn normalize_text(text: &str) -> String {
    let mut current = pass(text);
    // Every pass after the first strictly shortens the text or leaves it as is.
    loop {
        let next = pass(&current);
        if next == current {
            return current;
        }
        current = next;
    }
}

fn pass(text: &str) -> String {
    // Emoji inside a URL survive as separate tokens.
    let s = URL.replace_all(text, |caps: &regex::Captures| {
        let kept: String = caps[0].chars().filter(|&c| is_emoji(c)).collect();
        format!(" {kept} ")
    });
    let s = MENTION_OR_HASHTAG.replace_all(&s, "");
    let s = RETWEET.replace_all(&s, "");
    let s = merge_spelled_out(&s);
    let s = strip_special(&s);
    let s = collapse_letter_runs(&s);
    let s = merge_spelled_out(&s);
    collapse_whitespace(&s)
}

fn is_separator(c: char) -> bool {
    c == ' ' || c == '.'
}

/// "h a p p y" / "h.a.p.p.y" -> "happy" (three or more isolated letters).
fn merge_spelled_out(text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let isolated_letter = |i: usize| {
        chars[i].is_alphabetic()
            && (i == 0 || !chars[i - 1].is_alphanumeric())
            && (i + 1 == chars.len() || !chars[i + 1].is_alphanumeric())
    };

    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    while i < chars.len() {
        if !isolated_letter(i) {
            out.push(chars[i]);
            i += 1;
            continue;
        }
        let mut units = vec![i];
        let mut end = i + 1;
        loop {
            let mut k = end;
            while k < chars.len() && is_separator(chars[k]) {
                k += 1;
            }
            if k > end && k < chars.len() && isolated_letter(k) {
                units.push(k);
                end = k + 1;
            } else {
                break;
            }
        }
        if units.len() >= 3 {
            out.extend(units.iter().map(|&u| chars[u]));
            i = end;
        } else {
            out.push(chars[i]);
            i += 1;
        }
    }
    out
}

fn strip_special(text: &str) -> String {
    text.chars()
        .filter(|&c| !matches!(c, '\'' | '\u{2019}' | '\u{02BC}'))
        .map(|c| {
            if c.is_alphanumeric() || is_emoji(c) || c == '!' {
                c
            } else {
                ' '
            }
        })
        .collect()
}

/// "haaappy" -> "happy": runs of 3+ identical letters shrink to one; pairs stay.
fn collapse_letter_runs(text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let mut j = i + 1;
        while j < chars.len() && chars[j] == c {
            j += 1;
        }
        let run = j - i;
        if c.is_alphabetic() && run >= 3 {
            out.push(c);
        } else {
            out.extend(std::iter::repeat_n(c, run));
        }
        i = j;
    }
    out
}

fn collapse_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn repeated_letters() {
        assert_eq!(normalize_text("haaappy"), "happy");
        assert_eq!(normalize_text("good"), "good");
        assert_eq!(normalize_text("NOOOO"), "NO");
    }

    #[test]
    fn spelled_out_words() {
        assert_eq!(normalize_text("h.a.p.p.y"), "happy");
        assert_eq!(normalize_text("h a p p y"), "happy");
        assert_eq!(normalize_text("so h a p p y today"), "so happy today");
        // two isolated letters are left alone
        assert_eq!(normalize_text("a b"), "a b");
    }

    #[test]
    fn urls_mentions_hashtags() {
        assert_eq!(normalize_text("see https://x.co now"), "see now");
        assert_eq!(normalize_text("go to www.bbc.co.uk today"), "go to today");
        assert_eq!(normalize_text("RT @bob: #breaking shame on you"), "shame on you");
        assert_eq!(normalize_text("https://a.b/c"), "");
    }

    #[test]
    fn special_characters() {
        assert_eq!(normalize_text("don't stop!!"), "dont stop!!");
        assert_eq!(normalize_text("good,bad;ugly"), "good bad ugly");
        assert_eq!(normalize_text("wow 🙂👍🏽"), "wow 🙂👍");
        assert_eq!(normalize_text("GREAT   job!"), "GREAT job!");
    }

    fn emoji_count(s: &str) -> usize {
        s.chars().filter(|&c| is_emoji(c)).count()
    }

    proptest! {
        #[test]
        fn idempotent(s in "[a-zA-Z .!@#:/'🙂😡aaa]{0,40}") {
            let once = normalize_text(&s);
            prop_assert_eq!(normalize_text(&once), once.clone());
        }

        #[test]
        fn idempotent_on_arbitrary_unicode(s in "\\PC{0,30}") {
            let once = normalize_text(&s);
            prop_assert_eq!(normalize_text(&once), once.clone());
        }

        #[test]
        fn emoji_preserved(s in "[a-z !.,🙂😡❤]{0,40}") {
            prop_assert_eq!(emoji_count(&normalize_text(&s)), emoji_count(&s));
        }
    }
}
