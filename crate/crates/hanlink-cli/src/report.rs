//! Report rendering: aligned human tables or line-delimited key=value
//! records over the same row data.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutFormat {
    Table,
    Kv,
}

impl OutFormat {
    pub fn from_name(s: &str) -> Option<OutFormat> {
        match s.to_lowercase().as_str() {
            "table" => Some(OutFormat::Table),
            "kv" => Some(OutFormat::Kv),
            _ => None,
        }
    }
}

/// One report section: a header, rows under it, and an optional kv record
/// tag (the `kind=` field that lets mixed sections interleave in kv mode).
pub struct Section {
    pub kind: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Section {
    pub fn new(kind: &'static str, header: Vec<&'static str>) -> Section {
        Section { kind, header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

fn render_table(s: &Section, out: &mut String) {
    let mut widths: Vec<usize> = s.header.iter().map(|h| h.chars().count()).collect();
    for row in &s.rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<String>, out: &mut String| {
        let mut parts = Vec::with_capacity(cells.len());
        for (i, c) in cells.iter().enumerate() {
            let pad = widths[i].saturating_sub(c.chars().count());
            parts.push(format!("{c}{}", " ".repeat(pad)));
        }
        out.push_str(parts.join("  ").trim_end());
        out.push('\n');
    };
    line(s.header.iter().map(|h| h.to_string()).collect(), out);
    line(s.header.iter().map(|h| "-".repeat(h.chars().count())).collect(), out);
    for row in &s.rows {
        line(row.clone(), out);
    }
}

fn render_kv(s: &Section, out: &mut String) {
    for row in &s.rows {
        let mut fields = vec![format!("kind={}", s.kind)];
        for (h, cell) in s.header.iter().zip(row) {
            fields.push(format!("{h}={cell}"));
        }
        out.push_str(&fields.join("\t"));
        out.push('\n');
    }
}

/// Render sections into one report string. Table mode separates sections
/// with a blank line and titles them by kind.
pub fn render(sections: &[Section], format: OutFormat) -> String {
    let mut out = String::new();
    for (i, s) in sections.iter().enumerate() {
        match format {
            OutFormat::Table => {
                if i > 0 {
                    out.push('\n');
                }
                out.push_str(&format!("[{}]\n", s.kind));
                render_table(s, &mut out);
            }
            OutFormat::Kv => render_kv(s, &mut out),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Section {
        let mut s = Section::new("demo", vec!["name", "count"]);
        s.push(vec!["chan".to_string(), "12".to_string()]);
        s.push(vec!["au yeung".to_string(), "3".to_string()]);
        s
    }

    #[test]
    fn table_aligns_columns() {
        let text = render(&[sample()], OutFormat::Table);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "[demo]");
        assert_eq!(lines[1], "name      count");
        assert_eq!(lines[3], "chan      12");
        assert_eq!(lines[4], "au yeung  3");
    }

    #[test]
    fn kv_is_line_delimited() {
        let text = render(&[sample()], OutFormat::Kv);
        assert_eq!(text.lines().next().unwrap(), "kind=demo\tname=chan\tcount=12");
        assert_eq!(text.lines().count(), 2);
    }
}
