//! Word and chain file formats.
//!
//! Text words are one per line, decimal letters separated by single spaces.
//! Binary words are a little-endian `u64` count followed by that many
//! little-endian `u32` letters. Chains are JSON objects with `states`,
//! `transition` (row-stochastic) and `initial`.

use std::io::{Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::markov::MarkovChain;
use crate::words::{Letter, Word};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Text { line: usize, message: String },
    #[error("binary word: {0}")]
    Binary(String),
    #[error("chain file: {0}")]
    Chain(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn parse_line(line: &str, number: usize) -> Result<Word, FormatError> {
    let letters = line
        .split(' ')
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<Letter>().map_err(|_| FormatError::Text {
                line: number,
                message: format!("`{t}` is not a decimal letter"),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Word::from_letters(letters))
}

/// Every line is a word; a trailing newline does not add an empty one.
pub fn parse_words(text: &str) -> Result<Vec<Word>, FormatError> {
    text.lines()
        .enumerate()
        .map(|(i, line)| parse_line(line.trim_end_matches('\r'), i + 1))
        .collect()
}

pub fn format_word(w: &Word) -> String {
    let parts: Vec<String> = w.letters().iter().map(u64::to_string).collect();
    parts.join(" ")
}

pub fn format_words(words: &[Word]) -> String {
    words.iter().map(|w| format_word(w) + "\n").collect()
}

pub fn encode_binary(w: &Word) -> Result<Vec<u8>, FormatError> {
    let mut out = Vec::with_capacity(8 + 4 * w.len());
    out.extend_from_slice(&(w.len() as u64).to_le_bytes());
    for (i, &l) in w.letters().iter().enumerate() {
        let l = u32::try_from(l).map_err(|_| {
            FormatError::Binary(format!("letter {l} at position {i} exceeds 32 bits"))
        })?;
        out.extend_from_slice(&l.to_le_bytes());
    }
    Ok(out)
}

pub fn decode_binary(bytes: &[u8]) -> Result<Word, FormatError> {
    let (head, body) = bytes
        .split_first_chunk::<8>()
        .ok_or_else(|| FormatError::Binary("missing 8-byte length prefix".into()))?;
    let count = u64::from_le_bytes(*head);
    if body.len() as u64 != count.saturating_mul(4) {
        return Err(FormatError::Binary(format!(
            "prefix announces {count} letters but {} bytes follow",
            body.len()
        )));
    }
    let letters = body
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().unwrap()) as Letter)
        .collect();
    Ok(Word::from_letters(letters))
}

pub fn parse_chain(json: &str) -> Result<MarkovChain, FormatError> {
    serde_json::from_str(json).map_err(|e| FormatError::Chain(e.to_string()))
}

/// Words from a file; `.bin` files hold one binary word, anything else is text.
pub fn read_words(path: &Path) -> Result<Vec<Word>, FormatError> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    if path.extension().is_some_and(|e| e == "bin") {
        return Ok(vec![decode_binary(&bytes)?]);
    }
    let text = String::from_utf8(bytes).map_err(|_| FormatError::Text {
        line: 0,
        message: "file is not UTF-8".into(),
    })?;
    parse_words(&text)
}

pub fn write_binary(path: &Path, w: &Word) -> Result<(), FormatError> {
    std::fs::File::create(path)?.write_all(&encode_binary(w)?)?;
    Ok(())
}

pub fn read_chain(path: &Path) -> Result<MarkovChain, FormatError> {
    parse_chain(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let words = parse_words("1 0 2 0 2 0\n\n3\n").unwrap();
        assert_eq!(words.len(), 3);
        assert_eq!(words[0].letters(), &[1, 0, 2, 0, 2, 0]);
        assert!(words[1].is_empty());
        assert_eq!(format_words(&words), "1 0 2 0 2 0\n\n3\n");
        assert!(matches!(
            parse_words("1 x"),
            Err(FormatError::Text { line: 1, .. })
        ));
        assert!(parse_words("1 -2").is_err());
    }

    #[test]
    fn binary_round_trip() {
        let w = Word::from_letters(vec![5, 0, 4_000_000_000, 7]);
        let bytes = encode_binary(&w).unwrap();
        assert_eq!(bytes.len(), 8 + 16);
        assert_eq!(&bytes[..8], &4u64.to_le_bytes());
        assert_eq!(decode_binary(&bytes).unwrap(), w);
        assert!(decode_binary(&bytes[..10]).is_err());
        assert!(decode_binary(&[1, 0]).is_err());
        assert!(encode_binary(&Word::from_letters(vec![1 << 33])).is_err());
    }

    #[test]
    fn chain_json() {
        let c = parse_chain(
            r#"{"states":[0,1],"transition":[[0.5,0.5],[0.5,0.5]],"initial":[0.5,0.5]}"#,
        )
        .unwrap();
        assert_eq!(c.len(), 2);
        let err = parse_chain(
            r#"{"states":[0,1],"transition":[[0.5,0.6],[0.5,0.5]],"initial":[0.5,0.5]}"#,
        );
        assert!(matches!(err, Err(FormatError::Chain(m)) if m.contains("row 0")));
        assert!(parse_chain("{").is_err());
    }
}
