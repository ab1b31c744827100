//! Plain-text machine format.
//!
//! ```text
//! # comment
//! TRANSDUCER n=4 r=0 states=a,b initial=-
//! a 0 -> a : 0
//! a 1 -> b : 0
//! ...
//! ```
//!
//! Every `(state, letter)` pair must appear exactly once. The root-reading
//! initial state of a machine with `r > 0` takes dotted letters `.0 .. .r-1`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::transducer::{Edge, StateId, Transducer};
use crate::words::{Letter, Word};

pub fn to_text(t: &Transducer) -> String {
    let n = t.n();
    let initial = t.initial().map_or("-".to_string(), |q| t.label(q).to_string());
    let mut out = format!(
        "TRANSDUCER n={} r={} states={} initial={}\n",
        n,
        t.roots(),
        t.labels().join(","),
        initial
    );
    for q in t.states() {
        for a in t.letters(q) {
            let e = t.edge(q, a).expect("letter in range");
            out.push_str(&format!(
                "{} {} -> {} : {}\n",
                t.label(q),
                Word::letter(a).display_with(n),
                t.label(e.target),
                e.output.display_with(n)
            ));
        }
    }
    out
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

/// Splits on whitespace, keeping 1-based starting columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

struct Header {
    n: usize,
    r: usize,
    states: Vec<String>,
    initial: Option<String>,
}

fn parse_header(line_no: usize, line: &str) -> Result<Header> {
    let toks = tokens(line);
    match toks.first() {
        Some((_, "TRANSDUCER")) => {}
        Some((c, _)) => return Err(parse_err(line_no, *c, "expected `TRANSDUCER` header")),
        None => return Err(parse_err(line_no, 1, "empty header")),
    }
    let mut fields: HashMap<&str, (usize, &str)> = HashMap::new();
    for &(col, tok) in &toks[1..] {
        let (key, value) = tok
            .split_once('=')
            .ok_or_else(|| parse_err(line_no, col, format!("expected key=value, found `{tok}`")))?;
        if !["n", "r", "states", "initial"].contains(&key) {
            return Err(parse_err(line_no, col, format!("unknown header field `{key}`")));
        }
        if fields.insert(key, (col, value)).is_some() {
            return Err(parse_err(line_no, col, format!("duplicate header field `{key}`")));
        }
    }
    let get = |key: &str| {
        fields
            .get(key)
            .copied()
            .ok_or_else(|| parse_err(line_no, line.len() + 1, format!("missing header field `{key}`")))
    };
    let (col, n) = get("n")?;
    let n: usize = n.parse().map_err(|_| parse_err(line_no, col, format!("bad alphabet size `{n}`")))?;
    let (col, r) = get("r")?;
    let r: usize = r.parse().map_err(|_| parse_err(line_no, col, format!("bad root count `{r}`")))?;
    let (col, states) = get("states")?;
    let states: Vec<String> = states.split(',').map(str::to_string).collect();
    if states.iter().any(|s| s.is_empty()) {
        return Err(parse_err(line_no, col, "empty state name"));
    }
    let (_, initial) = get("initial")?;
    let initial = if initial == "-" { None } else { Some(initial.to_string()) };
    Ok(Header { n, r, states, initial })
}

pub fn parse_transducer(text: &str) -> Result<Transducer> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let (header_line, header) = lines.next().ok_or_else(|| parse_err(1, 1, "empty input"))?;
    let h = parse_header(header_line, header)?;
    let index: HashMap<&str, StateId> = h.states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    if index.len() != h.states.len() {
        return Err(parse_err(header_line, 1, "duplicate state name"));
    }
    let initial = match &h.initial {
        Some(name) => Some(
            *index
                .get(name.as_str())
                .ok_or_else(|| parse_err(header_line, 1, format!("unknown initial state `{name}`")))?,
        ),
        None => None,
    };
    if h.r > 0 && initial.is_none() {
        return Err(parse_err(header_line, 1, "r > 0 requires an initial state"));
    }
    if !(2..=Letter::MAX as usize / 2).contains(&h.n) || h.n + h.r > Letter::MAX as usize {
        return Err(parse_err(header_line, 1, format!("unsupported sizes n={} r={}", h.n, h.r)));
    }
    let reads_roots = |q: StateId| h.r > 0 && initial == Some(q);
    let mut table: Vec<Vec<Option<Edge>>> = (0..h.states.len())
        .map(|q| vec![None; if reads_roots(q) { h.r } else { h.n }])
        .collect();

    for (line_no, line) in lines {
        let toks = tokens(line);
        if toks.len() < 5 || toks[2].1 != "->" || toks[4].1 != ":" {
            return Err(parse_err(line_no, 1, "expected `<state> <letter> -> <state> : <word>`"));
        }
        let (col, src) = toks[0];
        let q = *index.get(src).ok_or_else(|| parse_err(line_no, col, format!("unknown state `{src}`")))?;
        let (col, letter) = toks[1];
        let slot = if reads_roots(q) {
            let k: usize = letter
                .strip_prefix('.')
                .and_then(|k| k.parse().ok())
                .ok_or_else(|| parse_err(line_no, col, format!("state `{src}` reads dotted letters, found `{letter}`")))?;
            if k >= h.r {
                return Err(parse_err(line_no, col, format!("dotted letter `{letter}` out of range")));
            }
            k
        } else {
            let a: usize = letter
                .parse()
                .map_err(|_| parse_err(line_no, col, format!("bad letter `{letter}`")))?;
            if a >= h.n {
                return Err(parse_err(line_no, col, format!("letter {a} out of range for n={}", h.n)));
            }
            a
        };
        let (col, dst) = toks[3];
        let target =
            *index.get(dst).ok_or_else(|| parse_err(line_no, col, format!("unknown state `{dst}`")))?;
        let (col, _) = toks.get(5).copied().ok_or_else(|| parse_err(line_no, line.len() + 1, "missing output word"))?;
        if toks.len() > 6 {
            return Err(parse_err(line_no, toks[6].0, "unexpected text after output word"));
        }
        let word = Word::parse_with(toks[5].1, h.n, h.r).map_err(|e| parse_err(line_no, col, e.to_string()))?;
        if table[q][slot].is_some() {
            return Err(parse_err(line_no, 1, format!("duplicate transition for `{src}` on `{letter}`")));
        }
        table[q][slot] = Some(Edge::new(target, word));
    }

    let mut edges = Vec::with_capacity(table.len());
    for (q, row) in table.into_iter().enumerate() {
        let mut out = Vec::with_capacity(row.len());
        for (slot, e) in row.into_iter().enumerate() {
            match e {
                Some(e) => out.push(e),
                None => {
                    let letter = if reads_roots(q) { format!(".{slot}") } else { slot.to_string() };
                    return Err(parse_err(
                        header_line,
                        1,
                        format!("missing transition for state `{}` on letter {letter}", h.states[q]),
                    ));
                }
            }
        }
        edges.push(out);
    }
    Transducer::new(h.n, h.r, initial, h.states, edges).map_err(|e| parse_err(header_line, 1, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{example_g, example_t};

    #[test]
    fn round_trip_examples() {
        for t in [example_g(), example_t(4).unwrap()] {
            let text = to_text(&t);
            let back = parse_transducer(&text).unwrap();
            assert_eq!(back, t);
            assert_eq!(back.labels(), t.labels());
        }
    }

    #[test]
    fn rooted_round_trip() {
        let text = "TRANSDUCER n=2 r=2 states=r,s initial=r\n\
                    r .0 -> s : .1\n\
                    r .1 -> s : .0\n\
                    s 0 -> s : 0\n\
                    s 1 -> s : 1\n";
        let t = parse_transducer(text).unwrap();
        assert_eq!(to_text(&t), text);
    }

    #[test]
    fn missing_pair_is_an_error() {
        let text = "TRANSDUCER n=2 r=0 states=a initial=-\na 0 -> a : 0\n";
        let err = parse_transducer(text).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
    }

    #[test]
    fn reports_line_and_column() {
        let text = "# comment\nTRANSDUCER n=2 r=0 states=a initial=-\na 0 -> a : 0\na 7 -> a : 1\n";
        match parse_transducer(text).unwrap_err() {
            Error::Parse { line, column, .. } => assert_eq!((line, column), (4, 3)),
            other => panic!("unexpected {other}"),
        }
        let text = "TRANSDUCER n=2 r=0 states=a initial=-\na 0 -> b : 0\n";
        match parse_transducer(text).unwrap_err() {
            Error::Parse { line, column, .. } => assert_eq!((line, column), (2, 8)),
            other => panic!("unexpected {other}"),
        }
    }
}
