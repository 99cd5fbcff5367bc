#![allow(dead_code)]

use std::path::PathBuf;
use std::process::{Command, Output};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn effrank(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_effrank"))
        .args(args)
        .output()
        .expect("spawn effrank")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

pub type DotGraph = (Vec<String>, Vec<(String, String)>);

/// Recognizes the DOT subset `digraph ID { (node_stmt | edge_stmt) ;* }`,
/// with IDs as quoted strings, alphanumeric identifiers or numerals, and
/// optional attribute lists. Returns (nodes, edges).
pub fn parse_dot(text: &str) -> Result<DotGraph, String> {
    #[derive(Debug, PartialEq, Clone)]
    enum Tok {
        Id(String),
        LBrace,
        RBrace,
        LBracket,
        RBracket,
        Semi,
        Comma,
        Eq,
        Arrow,
    }
    let mut toks = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '{' => {
                toks.push(Tok::LBrace);
                i += 1
            }
            '}' => {
                toks.push(Tok::RBrace);
                i += 1
            }
            '[' => {
                toks.push(Tok::LBracket);
                i += 1
            }
            ']' => {
                toks.push(Tok::RBracket);
                i += 1
            }
            ';' => {
                toks.push(Tok::Semi);
                i += 1
            }
            ',' => {
                toks.push(Tok::Comma);
                i += 1
            }
            '=' => {
                toks.push(Tok::Eq);
                i += 1
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                toks.push(Tok::Arrow);
                i += 2
            }
            '"' => {
                let mut s = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => return Err("unterminated string".into()),
                        Some('"') => {
                            i += 1;
                            break;
                        }
                        Some('\\') => {
                            match chars.get(i + 1) {
                                Some('"') => s.push('"'),
                                Some(&other) => {
                                    s.push('\\');
                                    s.push(other)
                                }
                                None => return Err("dangling escape".into()),
                            }
                            i += 2;
                        }
                        Some(&ch) => {
                            s.push(ch);
                            i += 1
                        }
                    }
                }
                toks.push(Tok::Id(s));
            }
            c if c.is_alphanumeric() || c == '_' || c == '.' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '.')
                {
                    i += 1;
                }
                toks.push(Tok::Id(chars[start..i].iter().collect()));
            }
            other => return Err(format!("unexpected character {other:?}")),
        }
    }

    let mut p = 0;
    let expect = |p: &mut usize, t: Tok| -> Result<(), String> {
        if toks.get(*p) == Some(&t) {
            *p += 1;
            Ok(())
        } else {
            Err(format!("expected {t:?} at token {}", *p))
        }
    };
    match toks.get(p) {
        Some(Tok::Id(k)) if k == "digraph" => p += 1,
        _ => return Err("missing `digraph` keyword".into()),
    }
    if let Some(Tok::Id(_)) = toks.get(p) {
        p += 1
    }
    expect(&mut p, Tok::LBrace)?;
    let (mut nodes, mut edges) = (Vec::new(), Vec::new());
    loop {
        match toks.get(p).cloned() {
            Some(Tok::RBrace) => {
                p += 1;
                break;
            }
            Some(Tok::Id(a)) => {
                p += 1;
                if toks.get(p) == Some(&Tok::Arrow) {
                    p += 1;
                    let Some(Tok::Id(b)) = toks.get(p).cloned() else {
                        return Err("edge without target".into());
                    };
                    p += 1;
                    edges.push((a, b));
                } else {
                    nodes.push(a);
                }
                if toks.get(p) == Some(&Tok::LBracket) {
                    while toks.get(p) != Some(&Tok::RBracket) {
                        p += 1;
                        if p >= toks.len() {
                            return Err("unterminated attribute list".into());
                        }
                    }
                    p += 1;
                }
                if toks.get(p) == Some(&Tok::Semi) {
                    p += 1
                }
            }
            other => return Err(format!("unexpected token {other:?}")),
        }
    }
    if p != toks.len() {
        return Err("trailing tokens after graph".into());
    }
    Ok((nodes, edges))
}
