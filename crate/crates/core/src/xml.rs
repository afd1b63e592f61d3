//! Minimal deterministic XML writer. Attribute order is the call order,
//! indentation is two spaces, and empty elements self-close.

pub(crate) struct XmlWriter {
    out: String,
    stack: Vec<(String, bool)>,
    open_tag: bool,
}

impl XmlWriter {
    pub fn new() -> Self {
        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        XmlWriter {
            out,
            stack: Vec::new(),
            open_tag: false,
        }
    }

    fn close_pending(&mut self, newline: bool) {
        if self.open_tag {
            self.out.push('>');
            if newline {
                self.out.push('\n');
            }
            self.open_tag = false;
        }
    }

    fn indent(&mut self) {
        for _ in 0..self.stack.len() {
            self.out.push_str("  ");
        }
    }

    pub fn start(&mut self, name: &str, attrs: &[(&str, &str)]) {
        self.close_pending(true);
        if let Some(parent) = self.stack.last_mut() {
            parent.1 = true;
        }
        self.indent();
        self.out.push('<');
        self.out.push_str(name);
        for (k, v) in attrs {
            self.out.push(' ');
            self.out.push_str(k);
            self.out.push_str("=\"");
            escape_into(&mut self.out, v, true);
            self.out.push('"');
        }
        self.stack.push((name.to_string(), false));
        self.open_tag = true;
    }

    pub fn empty(&mut self, name: &str, attrs: &[(&str, &str)]) {
        self.start(name, attrs);
        self.end();
    }

    /// Element whose only content is character data, written on one line.
    pub fn text_element(&mut self, name: &str, attrs: &[(&str, &str)], text: &str) {
        self.start(name, attrs);
        self.close_pending(false);
        escape_into(&mut self.out, text, false);
        let (name, _) = self.stack.pop().expect("element stack");
        self.out.push_str("</");
        self.out.push_str(&name);
        self.out.push_str(">\n");
    }

    pub fn end(&mut self) {
        let (name, has_children) = self.stack.pop().expect("unbalanced end()");
        if self.open_tag && !has_children {
            self.out.push_str("/>\n");
            self.open_tag = false;
            return;
        }
        self.close_pending(true);
        self.indent();
        self.out.push_str("</");
        self.out.push_str(&name);
        self.out.push_str(">\n");
    }

    pub fn finish(self) -> String {
        assert!(self.stack.is_empty(), "unclosed elements: {:?}", self.stack);
        self.out
    }
}

fn escape_into(out: &mut String, s: &str, attr: bool) {
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' if attr => out.push_str("&quot;"),
            '\n' if attr => out.push_str("&#10;"),
            '\t' if attr => out.push_str("&#9;"),
            _ => out.push(c),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nesting_and_escaping() {
        let mut w = XmlWriter::new();
        w.start("a", &[("x", "1 < 2 & \"q\"")]);
        w.empty("b", &[]);
        w.text_element("c", &[], "$v.f = 'x' and 1 < 2");
        w.start("d", &[]);
        w.end();
        w.end();
        let s = w.finish();
        assert_eq!(
            s,
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<a x=\"1 &lt; 2 &amp; &quot;q&quot;\">\n  <b/>\n  <c>$v.f = 'x' and 1 &lt; 2</c>\n  <d/>\n</a>\n"
        );
        let doc = roxmltree::Document::parse(&s).unwrap();
        assert_eq!(doc.root_element().attribute("x"), Some("1 < 2 & \"q\""));
    }
}
