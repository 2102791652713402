use std::fmt;

use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Token {
    Ident(String),
    Variable(String),
    Integer(i64),
    Str(String),
    Aggregate(String),
    Not,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Semicolon,
    Colon,
    If,
    WeakIf,
    Dot,
    Bar,
    Question,
    At,
    Minus,
    Op(&'static str),
    Eof,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Ident(s) | Token::Variable(s) | Token::Str(s) | Token::Aggregate(s) => {
                write!(f, "`{s}`")
            }
            Token::Integer(i) => write!(f, "`{i}`"),
            Token::Not => f.write_str("`not`"),
            Token::LParen => f.write_str("`(`"),
            Token::RParen => f.write_str("`)`"),
            Token::LBrace => f.write_str("`{`"),
            Token::RBrace => f.write_str("`}`"),
            Token::LBracket => f.write_str("`[`"),
            Token::RBracket => f.write_str("`]`"),
            Token::Comma => f.write_str("`,`"),
            Token::Semicolon => f.write_str("`;`"),
            Token::Colon => f.write_str("`:`"),
            Token::If => f.write_str("`:-`"),
            Token::WeakIf => f.write_str("`:~`"),
            Token::Dot => f.write_str("`.`"),
            Token::Bar => f.write_str("`|`"),
            Token::Question => f.write_str("`?`"),
            Token::At => f.write_str("`@`"),
            Token::Minus => f.write_str("`-`"),
            Token::Op(op) => write!(f, "`{op}`"),
            Token::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Spanned {
    pub token: Token,
    pub line: usize,
    pub col: usize,
}

fn advance(chars: &[char], i: &mut usize, line: &mut usize, col: &mut usize) {
    if chars[*i] == '\n' {
        *line += 1;
        *col = 1;
    } else {
        *col += 1;
    }
    *i += 1;
}

pub fn tokenize(source: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = source.chars().collect();
    let mut tokens = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let mut anonymous = 0usize;

    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            advance(&chars, &mut i, &mut line, &mut col);
            continue;
        }
        if c == '%' {
            // `%* ... *%` block comment or `%` line comment
            if chars.get(i + 1) == Some(&'*') {
                let (start_line, start_col) = (line, col);
                advance(&chars, &mut i, &mut line, &mut col);
                advance(&chars, &mut i, &mut line, &mut col);
                loop {
                    if i >= chars.len() {
                        return Err(ParseError::syntax(
                            start_line,
                            start_col,
                            vec!["`*%`".into()],
                            "end of input".into(),
                        ));
                    }
                    if chars[i] == '*' && chars.get(i + 1) == Some(&'%') {
                        advance(&chars, &mut i, &mut line, &mut col);
                        advance(&chars, &mut i, &mut line, &mut col);
                        break;
                    }
                    advance(&chars, &mut i, &mut line, &mut col);
                }
            } else {
                while i < chars.len() && chars[i] != '\n' {
                    advance(&chars, &mut i, &mut line, &mut col);
                }
            }
            continue;
        }

        let (tline, tcol) = (line, col);
        let peek = chars.get(i + 1).copied();
        let mut push = |token: Token| {
            tokens.push(Spanned {
                token,
                line: tline,
                col: tcol,
            })
        };

        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                advance(&chars, &mut i, &mut line, &mut col);
            }
            let word: String = chars[start..i].iter().collect();
            if word == "not" {
                push(Token::Not);
            } else if c.is_ascii_uppercase() {
                push(Token::Variable(word));
            } else if word == "_" {
                anonymous += 1;
                push(Token::Variable(format!("_{anonymous}")));
            } else if c == '_' && word[1..].bytes().all(|b| b.is_ascii_digit()) {
                push(Token::Variable(word));
            } else if c == '_' {
                return Err(ParseError::syntax(
                    tline,
                    tcol,
                    vec!["identifier".into(), "variable".into()],
                    format!("`{word}`"),
                ));
            } else {
                push(Token::Ident(word));
            }
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance(&chars, &mut i, &mut line, &mut col);
            }
            let digits: String = chars[start..i].iter().collect();
            let value = digits.parse::<i64>().map_err(|_| {
                ParseError::syntax(tline, tcol, vec!["64-bit integer".into()], digits.clone())
            })?;
            push(Token::Integer(value));
            continue;
        }
        if c == '"' {
            let start = i;
            advance(&chars, &mut i, &mut line, &mut col);
            loop {
                match chars.get(i) {
                    None | Some('\n') => {
                        return Err(ParseError::syntax(
                            tline,
                            tcol,
                            vec!["closing `\"`".into()],
                            "end of line".into(),
                        ))
                    }
                    Some('\\') => {
                        advance(&chars, &mut i, &mut line, &mut col);
                        if i < chars.len() {
                            advance(&chars, &mut i, &mut line, &mut col);
                        }
                    }
                    Some('"') => {
                        advance(&chars, &mut i, &mut line, &mut col);
                        break;
                    }
                    Some(_) => advance(&chars, &mut i, &mut line, &mut col),
                }
            }
            push(Token::Str(chars[start..i].iter().collect()));
            continue;
        }
        if c == '#' {
            let start = i;
            advance(&chars, &mut i, &mut line, &mut col);
            while i < chars.len() && chars[i].is_ascii_alphabetic() {
                advance(&chars, &mut i, &mut line, &mut col);
            }
            let word: String = chars[start..i].iter().collect();
            match word.as_str() {
                "#count" | "#sum" | "#min" | "#max" => push(Token::Aggregate(word)),
                _ => {
                    return Err(ParseError::syntax(
                        tline,
                        tcol,
                        vec!["`#count`, `#sum`, `#min` or `#max`".into()],
                        format!("`{word}`"),
                    ))
                }
            }
            continue;
        }

        let (token, width) = match (c, peek) {
            (':', Some('-')) => (Token::If, 2),
            (':', Some('~')) => (Token::WeakIf, 2),
            (':', _) => (Token::Colon, 1),
            ('!', Some('=')) => (Token::Op("!="), 2),
            ('<', Some('>')) => (Token::Op("!="), 2),
            ('<', Some('=')) => (Token::Op("<="), 2),
            ('>', Some('=')) => (Token::Op(">="), 2),
            ('=', Some('=')) => (Token::Op("="), 2),
            ('<', _) => (Token::Op("<"), 1),
            ('>', _) => (Token::Op(">"), 1),
            ('=', _) => (Token::Op("="), 1),
            ('(', _) => (Token::LParen, 1),
            (')', _) => (Token::RParen, 1),
            ('{', _) => (Token::LBrace, 1),
            ('}', _) => (Token::RBrace, 1),
            ('[', _) => (Token::LBracket, 1),
            (']', _) => (Token::RBracket, 1),
            (',', _) => (Token::Comma, 1),
            (';', _) => (Token::Semicolon, 1),
            ('.', _) => (Token::Dot, 1),
            ('|', _) => (Token::Bar, 1),
            ('?', _) => (Token::Question, 1),
            ('@', _) => (Token::At, 1),
            ('-', _) => (Token::Minus, 1),
            _ => {
                return Err(ParseError::syntax(
                    tline,
                    tcol,
                    vec!["token".into()],
                    format!("`{c}`"),
                ))
            }
        };
        push(token);
        for _ in 0..width {
            advance(&chars, &mut i, &mut line, &mut col);
        }
    }
    tokens.push(Spanned {
        token: Token::Eof,
        line,
        col,
    });
    Ok(tokens)
}
