use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use quick_xml::events::Event;
use quick_xml::Reader;
use rexinfer::{Regex, Sample, Symbol};

use crate::infer::{infer, InferOpts};
use crate::{read_input, write_output};

#[derive(Args, Debug)]
pub struct XmlArgs {
    /// XML documents (`-` reads stdin).
    #[arg(required = true)]
    pub paths: Vec<PathBuf>,
    /// Only this element.
    #[arg(long)]
    pub element: Option<String>,
    /// Directory receiving one `<element>.sample` file per element.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Infer a content model per element and print DTD element
    /// declarations instead of samples.
    #[arg(long)]
    pub dtd: bool,
    #[command(flatten)]
    pub opts: InferOpts,
}

/// Child sequences of every element, plus whether it ever held text.
#[derive(Default)]
pub struct Extracted {
    pub samples: BTreeMap<String, Sample>,
    pub has_text: BTreeSet<String>,
    pub warnings: Vec<String>,
}

struct Frame {
    name: String,
    children: Vec<Symbol>,
    text: bool,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, col)
}

impl Extracted {
    fn close(&mut self, f: Frame, origin: &str) {
        if f.text {
            if !f.children.is_empty() && !self.has_text.contains(&f.name) {
                self.warnings.push(format!(
                    "{origin}: element {} has mixed content; text is ignored",
                    f.name
                ));
            }
            self.has_text.insert(f.name.clone());
        }
        self.samples.entry(f.name).or_default().insert(f.children);
    }

    /// Add the elements of one document.
    pub fn add_document(&mut self, text: &str, origin: &str) -> Result<()> {
        let mut reader = Reader::from_str(text);
        let mut stack: Vec<Frame> = Vec::new();
        loop {
            let event = match reader.read_event() {
                Ok(e) => e,
                Err(e) => {
                    let (line, col) = line_col(text, reader.error_position() as usize);
                    bail!("{origin}:{line}:{col}: malformed XML: {e}");
                }
            };
            let opens = matches!(event, Event::Start(_));
            match event {
                Event::Start(e) | Event::Empty(e) => {
                    let name = String::from_utf8_lossy(e.name().as_ref()).into_owned();
                    if let Some(parent) = stack.last_mut() {
                        parent.children.push(Symbol::new(&name));
                    }
                    let frame = Frame {
                        name,
                        children: Vec::new(),
                        text: false,
                    };
                    if opens {
                        stack.push(frame);
                    } else {
                        self.close(frame, origin);
                    }
                }
                Event::End(_) => {
                    let frame = stack.pop().expect("the reader checks end tags");
                    self.close(frame, origin);
                }
                Event::Text(t) if t.iter().any(|b| !b.is_ascii_whitespace()) => {
                    if let Some(top) = stack.last_mut() {
                        top.text = true;
                    }
                }
                Event::CData(_) => {
                    if let Some(top) = stack.last_mut() {
                        top.text = true;
                    }
                }
                Event::Eof => break,
                _ => {}
            }
        }
        if let Some(open) = stack.last() {
            let (line, col) = line_col(text, text.len());
            bail!("{origin}:{line}:{col}: malformed XML: element {} is not closed", open.name);
        }
        Ok(())
    }
}

/// A DTD content particle.
fn particle(r: &Regex) -> String {
    let join = |cs: &[Regex], sep: &str| cs.iter().map(particle).collect::<Vec<_>>().join(sep);
    match r {
        Regex::Atom(a) => a.to_string(),
        Regex::Concat(cs) => format!("({})", join(cs, ", ")),
        Regex::Disj(cs) => format!("({})", join(cs, " | ")),
        Regex::Optional(c) => match &**c {
            Regex::Plus(inner) => format!("{}*", particle(inner)),
            c => format!("{}?", particle(c)),
        },
        Regex::Plus(c) => format!("{}+", particle(c)),
        Regex::Epsilon | Regex::Empty => "()".to_string(),
    }
}

/// The content model of an `<!ELEMENT>` declaration.
pub fn content_model(r: &Regex, text: bool) -> String {
    if text {
        let names: BTreeSet<String> = r.alphabet().iter().map(|a| a.to_string()).collect();
        return if names.is_empty() {
            "(#PCDATA)".to_string()
        } else {
            format!("(#PCDATA | {})*", names.into_iter().collect::<Vec<_>>().join(" | "))
        };
    }
    let group = |r: &Regex| match r {
        Regex::Concat(_) | Regex::Disj(_) => particle(r),
        r => format!("({})", particle(r)),
    };
    match r {
        Regex::Epsilon | Regex::Empty => "EMPTY".to_string(),
        Regex::Optional(c) => match &**c {
            Regex::Plus(inner) => format!("{}*", group(inner)),
            c => format!("{}?", group(c)),
        },
        Regex::Plus(c) => format!("{}+", group(c)),
        r => group(r),
    }
}

pub fn run(args: &XmlArgs) -> Result<()> {
    let mut ex = Extracted::default();
    for path in &args.paths {
        let text = read_input(path)?;
        ex.add_document(&text, &path.display().to_string())?;
    }
    for w in &ex.warnings {
        eprintln!("warning: {w}");
    }
    let selected: Vec<(&String, &Sample)> = match &args.element {
        Some(name) => match ex.samples.get_key_value(name) {
            Some(entry) => vec![entry],
            None => bail!("element {name} does not occur in the input"),
        },
        None => ex.samples.iter().collect(),
    };
    if args.dtd {
        let mut out = String::new();
        for (name, sample) in selected {
            let expr = infer(sample, &args.opts).with_context(|| format!("inferring element {name}"))?.expr;
            out += &format!("<!ELEMENT {name} {}>\n", content_model(&expr, ex.has_text.contains(name)));
        }
        return write_output(None, &out);
    }
    match (&args.out_dir, &args.element) {
        (Some(dir), _) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            for (name, sample) in selected {
                write_output(Some(&dir.join(format!("{name}.sample"))), &sample.to_lines())?;
            }
            Ok(())
        }
        (None, Some(_)) => write_output(None, &selected[0].1.to_lines()),
        (None, None) => bail!("give --element to print one sample, or --out-dir to write all of them"),
    }
}
