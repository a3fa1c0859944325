//! Comment and string-literal stripping.
//!
//! Stripping blanks out the bodies of comments and literals while keeping
//! every newline, so the output has exactly the same line structure as
//! the input and extraction can report real line numbers. String and
//! character delimiters stay in place; only their contents are blanked.

use super::language::Language;

/// Stripped text plus warnings about constructs that did not terminate
/// where the language says they must.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stripped {
    pub text: String,
    pub warnings: Vec<String>,
}

/// Blank comments and string/character literal bodies for `language`,
/// preserving line structure.
///
/// Unterminated block comments and unterminated C-family literals run to
/// end of file and are blanked all the way there, with a warning.
/// Fortran string literals do not span lines; an unterminated one is
/// blanked to end of line and warned about.
pub fn strip_non_code(content: &str, language: Language) -> Stripped {
    match language {
        Language::C | Language::Cpp | Language::Cuda | Language::OpenCl => strip_c_family(content),
        Language::FortranFixed => strip_fortran(content, true),
        Language::FortranFree => strip_fortran(content, false),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CState {
    Code,
    LineComment,
    BlockComment,
    Str,
    CharLit,
}

fn strip_c_family(content: &str) -> Stripped {
    let mut out = String::with_capacity(content.len());
    let mut warnings = Vec::new();
    let mut state = CState::Code;
    let mut line = 1u32;
    let mut opened_at = 0u32;
    // Last character emitted as code, used to tell a character literal
    // from a digit separator or an encoding-prefixed literal: a quote
    // directly after an identifier character (`1'000'000`, `L'a'`) does
    // not open a literal that could hide an MPI token, so it is left in
    // place rather than risking a runaway literal state.
    let mut prev_code: Option<char> = None;
    let mut chars = content.chars().peekable();

    while let Some(ch) = chars.next() {
        if ch == '\n' {
            line += 1;
        }
        match state {
            CState::Code => match ch {
                '/' if chars.peek() == Some(&'/') => {
                    chars.next();
                    out.push_str("  ");
                    state = CState::LineComment;
                    prev_code = None;
                }
                '/' if chars.peek() == Some(&'*') => {
                    chars.next();
                    out.push_str("  ");
                    state = CState::BlockComment;
                    opened_at = line;
                    prev_code = None;
                }
                '"' => {
                    out.push('"');
                    state = CState::Str;
                    opened_at = line;
                    prev_code = None;
                }
                '\'' => {
                    let after_identifier =
                        prev_code.map_or(false, |c| c.is_ascii_alphanumeric() || c == '_');
                    out.push('\'');
                    if after_identifier {
                        prev_code = Some('\'');
                    } else {
                        state = CState::CharLit;
                        opened_at = line;
                        prev_code = None;
                    }
                }
                _ => {
                    out.push(ch);
                    prev_code = Some(ch);
                }
            },
            CState::LineComment => {
                if ch == '\n' {
                    out.push('\n');
                    state = CState::Code;
                    prev_code = None;
                } else {
                    out.push(' ');
                }
            }
            CState::BlockComment => {
                if ch == '*' && chars.peek() == Some(&'/') {
                    chars.next();
                    out.push_str("  ");
                    state = CState::Code;
                    prev_code = None;
                } else if ch == '\n' {
                    out.push('\n');
                } else {
                    out.push(' ');
                }
            }
            CState::Str | CState::CharLit => {
                let quote = if state == CState::Str { '"' } else { '\'' };
                match ch {
                    '\\' => {
                        out.push(' ');
                        if let Some(escaped) = chars.next() {
                            if escaped == '\n' {
                                line += 1;
                                out.push('\n');
                            } else {
                                out.push(' ');
                            }
                        }
                    }
                    c if c == quote => {
                        out.push(quote);
                        state = CState::Code;
                        prev_code = None;
                    }
                    '\n' => out.push('\n'),
                    _ => out.push(' '),
                }
            }
        }
    }

    match state {
        CState::BlockComment => warnings.push(format!(
            "line {opened_at}: block comment is not terminated before end of file"
        )),
        CState::Str => warnings.push(format!(
            "line {opened_at}: string literal is not terminated before end of file"
        )),
        CState::CharLit => warnings.push(format!(
            "line {opened_at}: character literal is not terminated before end of file"
        )),
        CState::Code | CState::LineComment => {}
    }

    Stripped {
        text: out,
        warnings,
    }
}

fn strip_fortran(content: &str, fixed_form: bool) -> Stripped {
    let mut out = String::with_capacity(content.len());
    let mut warnings = Vec::new();

    let mut rest = content;
    let mut line_no = 0u32;
    while !rest.is_empty() {
        line_no += 1;
        let (line, remainder, had_newline) = match rest.find('\n') {
            Some(idx) => (&rest[..idx], &rest[idx + 1..], true),
            None => (rest, "", false),
        };
        strip_fortran_line(line, fixed_form, line_no, &mut out, &mut warnings);
        if had_newline {
            out.push('\n');
        }
        rest = remainder;
    }

    Stripped {
        text: out,
        warnings,
    }
}

fn strip_fortran_line(
    line: &str,
    fixed_form: bool,
    line_no: u32,
    out: &mut String,
    warnings: &mut Vec<String>,
) {
    if fixed_form {
        if let Some(first) = line.chars().next() {
            if matches!(first, 'c' | 'C' | '*') {
                out.extend(line.chars().map(|_| ' '));
                return;
            }
        }
    }

    let mut in_string: Option<char> = None;
    let mut chars = line.chars().peekable();
    while let Some(ch) = chars.next() {
        match in_string {
            None => match ch {
                '!' => {
                    // Comment to end of line, including the `!` itself.
                    out.push(' ');
                    out.extend(chars.by_ref().map(|_| ' '));
                }
                '\'' | '"' => {
                    out.push(ch);
                    in_string = Some(ch);
                }
                _ => out.push(ch),
            },
            Some(quote) => {
                if ch == quote {
                    if chars.peek() == Some(&quote) {
                        // A doubled quote is an escaped quote inside the
                        // string; both characters belong to the body.
                        chars.next();
                        out.push_str("  ");
                    } else {
                        out.push(quote);
                        in_string = None;
                    }
                } else {
                    out.push(' ');
                }
            }
        }
    }
    if in_string.is_some() {
        warnings.push(format!(
            "line {line_no}: string literal is not terminated before end of line"
        ));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn newlines(s: &str) -> usize {
        s.matches('\n').count()
    }

    #[test]
    fn line_comment_is_blanked() {
        let out = strip_non_code("int x; // MPI_Bcast(\n", Language::C);
        assert!(out.text.contains("int x;"));
        assert!(!out.text.contains("MPI_Bcast"));
        assert_eq!(newlines(out.text.as_str()), 1);
        assert!(out.warnings.is_empty());
    }

    #[test]
    fn block_comment_preserves_lines() {
        let src = "a();\n/* one\ntwo MPI_Reduce\nthree */ b();\n";
        let out = strip_non_code(src, Language::Cpp);
        assert_eq!(newlines(&out.text), newlines(src));
        assert!(!out.text.contains("MPI_Reduce"));
        assert!(out.text.contains("a();"));
        assert!(out.text.contains("b();"));
    }

    #[test]
    fn trailing_comment_keeps_real_call() {
        let src = "MPI_Reduce(a, b); /* MPI_Reduce is fused here */\n";
        let out = strip_non_code(src, Language::C);
        assert_eq!(out.text.matches("MPI_Reduce").count(), 1);
    }

    #[test]
    fn string_bodies_are_blanked_delimiters_kept() {
        let out = strip_non_code("printf(\"MPI_Bcast failed\");\n", Language::C);
        assert!(!out.text.contains("MPI_Bcast"));
        assert!(out.text.contains("printf(\""));
        assert!(out.text.contains("\");"));
    }

    #[test]
    fn escaped_quote_does_not_close_string() {
        let src = "s = \"a\\\"MPI_Gather\\\"b\"; MPI_Scatter(x);\n";
        let out = strip_non_code(src, Language::C);
        assert!(!out.text.contains("MPI_Gather"));
        assert!(out.text.contains("MPI_Scatter"));
    }

    #[test]
    fn comment_markers_inside_strings_are_inert() {
        let src = "url = \"http://host\"; MPI_Scatter(x);\n";
        let out = strip_non_code(src, Language::Cpp);
        assert!(out.text.contains("MPI_Scatter"));
    }

    #[test]
    fn quotes_inside_comments_are_inert() {
        let src = "/* unbalanced \" quote */ MPI_Bcast(x);\n";
        let out = strip_non_code(src, Language::C);
        assert!(out.text.contains("MPI_Bcast"));
    }

    #[test]
    fn char_literal_quote_does_not_open_string() {
        let src = "if (c == '\"') MPI_Barrier(comm);\n";
        let out = strip_non_code(src, Language::C);
        assert!(out.text.contains("MPI_Barrier"));
    }

    #[test]
    fn digit_separators_do_not_open_char_literals() {
        let src = "long n = 1'000'000;\nMPI_Allreduce(a, b, 1, t, op, comm);\n";
        let out = strip_non_code(src, Language::Cpp);
        assert!(out.text.contains("MPI_Allreduce"));
        assert!(out.warnings.is_empty());
    }

    #[test]
    fn unterminated_block_comment_blanks_to_eof_and_warns() {
        let src = "MPI_Barrier(c);\n/* MPI_Bcast\nMPI_Reduce\n";
        let out = strip_non_code(src, Language::C);
        assert!(out.text.contains("MPI_Barrier"));
        assert!(!out.text.contains("MPI_Bcast"));
        assert!(!out.text.contains("MPI_Reduce"));
        assert_eq!(newlines(&out.text), 3);
        assert_eq!(out.warnings.len(), 1);
        assert!(out.warnings[0].contains("line 2"));
    }

    #[test]
    fn string_with_line_splice_keeps_line_count() {
        let src = "s = \"abc\\\ndef\";\nMPI_Gather(x);\n";
        let out = strip_non_code(src, Language::C);
        assert_eq!(newlines(&out.text), newlines(src));
        assert!(out.text.contains("MPI_Gather"));
    }

    #[test]
    fn fortran_bang_comment_blanked() {
        let src = "call mpi_bcast(x) ! MPI_REDUCE here\n";
        let out = strip_non_code(src, Language::FortranFree);
        assert!(out.text.contains("call mpi_bcast(x)"));
        assert!(!out.text.to_ascii_lowercase().contains("mpi_reduce"));
    }

    #[test]
    fn fixed_form_column_one_comment_blanks_line() {
        let src = "c call mpi_reduce(x)\n      call mpi_barrier(ierr)\n* another comment\n";
        let out = strip_non_code(src, Language::FortranFixed);
        assert!(!out.text.contains("mpi_reduce"));
        assert!(out.text.contains("call mpi_barrier(ierr)"));
        assert!(!out.text.contains("another"));
        assert_eq!(newlines(&out.text), 3);
    }

    #[test]
    fn free_form_keeps_column_one_code() {
        let src = "call mpi_allgather(a, b)\n";
        let out = strip_non_code(src, Language::FortranFree);
        assert!(out.text.contains("mpi_allgather"));
    }

    #[test]
    fn fortran_doubled_quote_stays_in_string() {
        let src = "print *, 'it''s MPI_GATHER time'\ncall mpi_scatterv(x)\n";
        let out = strip_non_code(src, Language::FortranFree);
        assert!(!out.text.to_ascii_lowercase().contains("mpi_gather"));
        assert!(out.text.contains("mpi_scatterv"));
    }

    #[test]
    fn fortran_strings_do_not_span_lines() {
        let src = "x = 'abc\ny = 1\n";
        let out = strip_non_code(src, Language::FortranFree);
        assert!(out.text.contains("y = 1"));
        assert_eq!(out.warnings.len(), 1);
        assert!(out.warnings[0].contains("line 1"));
    }

    #[test]
    fn fortran_double_quoted_strings_blanked() {
        let src = "msg = \"call MPI_BCAST\" ; call mpi_gather(x)\n";
        let out = strip_non_code(src, Language::FortranFree);
        assert!(!out.text.to_ascii_lowercase().contains("mpi_bcast"));
        assert!(out.text.contains("mpi_gather"));
    }

    #[test]
    fn empty_input_stays_empty() {
        for lang in [Language::C, Language::FortranFixed, Language::FortranFree] {
            let out = strip_non_code("", lang);
            assert_eq!(out.text, "");
            assert!(out.warnings.is_empty());
        }
    }
}
