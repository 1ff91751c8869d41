use crate::lexer::Pos;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: unknown symbol `{name}`")]
    UnknownSymbol { line: usize, col: usize, name: String },
}

impl ParseError {
    pub fn syntax(p: Pos, msg: impl Into<String>) -> Self {
        ParseError::Syntax { line: p.line, col: p.col, msg: msg.into() }
    }

    pub fn unknown(p: Pos, name: &str) -> Self {
        ParseError::UnknownSymbol { line: p.line, col: p.col, name: name.into() }
    }
}
