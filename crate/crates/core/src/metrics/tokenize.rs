use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TokenScheme {
    /// Detach punctuation marks into their own tokens, in the spirit of the
    /// `13a` scheme used by common BLEU scorers.
    #[default]
    SplitPunctuation,
    WhitespaceOnly,
}

impl fmt::Display for TokenScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TokenScheme::SplitPunctuation => "split-punctuation",
            TokenScheme::WhitespaceOnly => "whitespace-only",
        })
    }
}

impl FromStr for TokenScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "split-punctuation" | "13a" => Ok(TokenScheme::SplitPunctuation),
            "whitespace-only" | "none" => Ok(TokenScheme::WhitespaceOnly),
            other => Err(format!("unknown tokenizer scheme `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct TokenizerConfig {
    pub scheme: TokenScheme,
    pub lowercase: bool,
}

impl TokenizerConfig {
    pub fn new(scheme: TokenScheme, lowercase: bool) -> Self {
        Self { scheme, lowercase }
    }
}

fn is_punctuation(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(
            c,
            '«' | '»'
                | '“'
                | '”'
                | '„'
                | '‘'
                | '’'
                | '–'
                | '—'
                | '…'
                | '¿'
                | '¡'
                | '·'
                | '।'
                | '॥'
        )
}

/// Whether punctuation mark `c` stays attached to its neighbours.
///
/// Apostrophes stay inside words (`don't`, `d'fhéadfadh`); `.` and `,` stay
/// inside numbers (`3.5`, `13,171`); `-` stays after a digit (`2021-22`).
fn stays_attached(prev: Option<char>, c: char, next: Option<char>) -> bool {
    let digit = |ch: Option<char>| ch.is_some_and(|ch| ch.is_ascii_digit());
    let alnum = |ch: Option<char>| ch.is_some_and(char::is_alphanumeric);
    match c {
        '\'' | '’' => alnum(prev) && alnum(next),
        '.' | ',' => digit(prev) && digit(next),
        '-' => digit(prev),
        _ => false,
    }
}

/// Splits `text` into tokens according to `config`.
pub fn tokenize(text: &str, config: &TokenizerConfig) -> Vec<String> {
    let owned;
    let text = if config.lowercase {
        owned = text.to_lowercase();
        owned.as_str()
    } else {
        text
    };
    match config.scheme {
        TokenScheme::WhitespaceOnly => text.split_whitespace().map(str::to_string).collect(),
        TokenScheme::SplitPunctuation => split_punctuation(text),
    }
}

fn split_punctuation(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if c.is_whitespace() {
            if !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
        } else if is_punctuation(c) {
            let prev = i.checked_sub(1).map(|p| chars[p]);
            let next = chars.get(i + 1).copied();
            if stays_attached(prev, c, next) {
                current.push(c);
            } else {
                if !current.is_empty() {
                    tokens.push(std::mem::take(&mut current));
                }
                tokens.push(c.to_string());
            }
        } else {
            current.push(c);
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(text: &str, scheme: TokenScheme) -> Vec<String> {
        tokenize(text, &TokenizerConfig::new(scheme, false))
    }

    #[test]
    fn whitespace_only() {
        assert_eq!(
            toks("how  COVID-19\tspreads", TokenScheme::WhitespaceOnly),
            ["how", "COVID-19", "spreads"]
        );
    }

    #[test]
    fn detaches_punctuation() {
        assert_eq!(
            toks("spreads, and", TokenScheme::SplitPunctuation),
            ["spreads", ",", "and"]
        );
        assert_eq!(
            toks("Scheme (EWSS) is", TokenScheme::SplitPunctuation),
            ["Scheme", "(", "EWSS", ")", "is"]
        );
        assert_eq!(toks("end.", TokenScheme::SplitPunctuation), ["end", "."]);
    }

    #[test]
    fn keeps_numbers_and_contractions() {
        assert_eq!(
            toks("13,171 lines, 3.5 h don't", TokenScheme::SplitPunctuation),
            ["13,171", "lines", ",", "3.5", "h", "don't"]
        );
        assert_eq!(
            toks("COVID-19 2021-22", TokenScheme::SplitPunctuation),
            ["COVID", "-", "19", "2021-22"]
        );
    }

    #[test]
    fn lowercases_before_splitting() {
        let cfg = TokenizerConfig::new(TokenScheme::SplitPunctuation, true);
        assert_eq!(
            tokenize("Scéim FÓIRDHEONTAIS.", &cfg),
            ["scéim", "fóirdheontais", "."]
        );
    }

    #[test]
    fn empty_and_blank() {
        assert!(toks("", TokenScheme::SplitPunctuation).is_empty());
        assert!(toks("   ", TokenScheme::WhitespaceOnly).is_empty());
    }
}
