//! Term syntax for both calculi: ASTs, printing, parsing and JSON encoding.

pub mod json;
pub mod lmu;
pub mod mupp;
pub mod parse;

use std::fmt;

/// Position of a subterm: child indices from the root. Binder bodies are
/// child 0; applications have function 0 and argument 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Path(pub Vec<u8>);

impl Path {
    pub fn root() -> Path {
        Path(Vec::new())
    }
    pub fn child(&self, i: u8) -> Path {
        let mut v = self.0.clone();
        v.push(i);
        Path(v)
    }
    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "root");
        }
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Error raised by parsers, well-formedness checks and JSON decoders.
#[derive(Debug, Clone, thiserror::Error)]
pub struct SyntaxError {
    pub msg: String,
    /// Byte offset in the source text, when known.
    pub at: Option<usize>,
}

impl SyntaxError {
    pub fn new(msg: impl Into<String>) -> Self {
        SyntaxError { msg: msg.into(), at: None }
    }
    pub fn at(msg: impl Into<String>, offset: usize) -> Self {
        SyntaxError { msg: msg.into(), at: Some(offset) }
    }
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.at {
            Some(off) => write!(f, "at byte {off}: {}", self.msg),
            None => write!(f, "{}", self.msg),
        }
    }
}
