//! Recursive-descent reader for sums of monomial terms.
//!
//! ```text
//! poly   := [sign] term (sign term)*
//! term   := coeff | [coeff '*'] factor ('*' factor)*
//! factor := 'x' index ['^' ['-'] exponent]
//! coeff  := integer | '(' a0 '|' a1 ')'
//! ```
//!
//! Whitespace is ignored. Coefficient text is handed back unparsed so the
//! caller can interpret it in its own ring.

use super::PolyError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RawTerm {
    pub negative: bool,
    pub coeff: Option<String>,
    /// `(variable, exponent)` pairs in source order; repeats allowed.
    pub factors: Vec<(usize, i64)>,
    /// Byte offset of the term in the input, for error messages.
    pub pos: usize,
}

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn error(&self, message: impl Into<String>) -> PolyError {
        PolyError::Syntax {
            pos: self.pos,
            message: message.into(),
        }
    }

    fn digits(&mut self) -> Result<&'a str, PolyError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected digits"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits"))
    }

    fn coeff(&mut self) -> Result<String, PolyError> {
        match self.peek() {
            Some(b'(') => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos] != b')' {
                    self.pos += 1;
                }
                if self.pos == self.src.len() {
                    return Err(PolyError::Syntax {
                        pos: start,
                        message: "unclosed '('".into(),
                    });
                }
                self.pos += 1;
                Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
            }
            _ => Ok(self.digits()?.to_string()),
        }
    }

    fn factor(&mut self) -> Result<(usize, i64), PolyError> {
        if self.peek() != Some(b'x') {
            return Err(self.error("expected a variable 'x<index>'"));
        }
        self.pos += 1;
        let idx: usize = self
            .digits()?
            .parse()
            .map_err(|_| self.error("variable index too large"))?;
        if self.peek() != Some(b'^') {
            return Ok((idx, 1));
        }
        self.pos += 1;
        let neg = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let e: i64 = self
            .digits()?
            .parse()
            .map_err(|_| self.error("exponent too large"))?;
        Ok((idx, if neg { -e } else { e }))
    }

    fn term(&mut self, negative: bool) -> Result<RawTerm, PolyError> {
        let pos = self.pos;
        let mut coeff = None;
        let mut factors = Vec::new();
        match self.peek() {
            Some(b'x') => factors.push(self.factor()?),
            Some(c) if c.is_ascii_digit() || c == b'(' => {
                coeff = Some(self.coeff()?);
                if self.peek() == Some(b'*') {
                    self.pos += 1;
                    factors.push(self.factor()?);
                }
            }
            Some(_) => return Err(self.error("expected a coefficient or variable")),
            None => return Err(self.error("unexpected end of input")),
        }
        while self.peek() == Some(b'*') {
            self.pos += 1;
            factors.push(self.factor()?);
        }
        Ok(RawTerm {
            negative,
            coeff,
            factors,
            pos,
        })
    }
}

pub(crate) fn parse_terms(text: &str) -> Result<Vec<RawTerm>, PolyError> {
    let mut cur = Cursor {
        src: text.as_bytes(),
        pos: 0,
    };
    let mut terms = Vec::new();
    let mut negative = match cur.peek() {
        Some(b'-') => {
            cur.pos += 1;
            true
        }
        Some(b'+') => {
            cur.pos += 1;
            false
        }
        None => return Err(cur.error("empty polynomial")),
        _ => false,
    };
    loop {
        terms.push(cur.term(negative)?);
        match cur.peek() {
            None => break,
            Some(b'+') => negative = false,
            Some(b'-') => negative = true,
            Some(_) => return Err(cur.error("expected '+' or '-'")),
        }
        cur.pos += 1;
    }
    Ok(terms)
}
