/**
 * Client-side check of the intervention command language.
 *
 * The service parses command text with this grammar (keywords
 * case-sensitive, whitespace free between tokens):
 *
 *     command := ("REMOVE" | "FREEZE") "id" "=" int
 *              | "REPLACE" "id" "=" int "WITH" quoted
 *              | "SET" "id" "=" int "velocity" "=" "(" num "," num ")"
 *              | "SET" "id" "=" int "attributes" "=" quoted
 *              | "NULL"
 *     suffix  := "AT" "t" "=" int ["FOR" int]
 *
 * Text whose leading token is not a known keyword is routed to the
 * language backend as a free-text query. This module reproduces that
 * classification locally so the form can flag errors before any request
 * is sent; the request body always carries the raw text.
 */

export type CommandKind =
  | 'REMOVE'
  | 'REPLACE'
  | 'SET_MOTION'
  | 'SET_ATTRIBUTE'
  | 'FREEZE'
  | 'NULL';

export interface ParsedCommand {
  kind: CommandKind;
  targetId: number | null;
  atFrame: number;
  duration: number | null;
  velocity: [number, number] | null;
  attributes: string | null;
}

export type InterventionCheck =
  | { outcome: 'command'; command: ParsedCommand }
  | { outcome: 'free-text' }
  | { outcome: 'error'; message: string; offset: number };

const KEYWORDS = ['REMOVE', 'REPLACE', 'SET', 'FREEZE', 'NULL'];
const SHAPES = ['rectangle', 'circle'];

class GrammarError extends Error {
  offset: number;
  constructor(message: string, offset: number) {
    super(message);
    this.offset = offset;
  }
}

/** Raised for an unknown leading keyword; callers treat it as free text. */
class UnknownKeyword extends GrammarError {}

interface Token {
  kind: 'word' | 'num' | 'punct' | 'quoted' | 'end';
  text: string;
  offset: number;
  end: number;
}

const WORD_RE = /[A-Za-z_]+/y;
const NUM_RE = /[+-]?\d+(\.\d+)?/y;
const INT_RE = /^\d+$/;

function lex(text: string): Token[] {
  const tokens: Token[] = [];
  let pos = 0;
  const n = text.length;
  while (pos < n) {
    const c = text[pos];
    if (/\s/.test(c)) {
      pos += 1;
      continue;
    }
    if (c === '"') {
      const close = text.indexOf('"', pos + 1);
      if (close < 0) {
        throw new GrammarError('unterminated quoted string', pos);
      }
      tokens.push({ kind: 'quoted', text: text.slice(pos + 1, close), offset: pos, end: close + 1 });
      pos = close + 1;
      continue;
    }
    WORD_RE.lastIndex = pos;
    let m = WORD_RE.exec(text);
    if (m) {
      tokens.push({ kind: 'word', text: m[0], offset: pos, end: pos + m[0].length });
      pos += m[0].length;
      continue;
    }
    NUM_RE.lastIndex = pos;
    m = NUM_RE.exec(text);
    if (m) {
      tokens.push({ kind: 'num', text: m[0], offset: pos, end: pos + m[0].length });
      pos += m[0].length;
      continue;
    }
    if ('=(),'.includes(c)) {
      tokens.push({ kind: 'punct', text: c, offset: pos, end: pos + 1 });
      pos += 1;
      continue;
    }
    throw new GrammarError(`unexpected character '${c}'`, pos);
  }
  tokens.push({ kind: 'end', text: '', offset: n, end: n });
  return tokens;
}

class Parser {
  tokens: Token[];
  i = 0;

  constructor(text: string) {
    this.tokens = lex(text);
  }

  get current(): Token {
    return this.tokens[this.i];
  }

  // errors point at the end of the last consumed token
  expectedAt(): number {
    return this.i === 0 ? 0 : this.tokens[this.i - 1].end;
  }

  takeWord(word: string): void {
    const t = this.current;
    if (t.kind !== 'word' || t.text !== word) {
      throw new GrammarError(`expected '${word}'`, this.expectedAt());
    }
    this.i += 1;
  }

  takePunct(punct: string): void {
    const t = this.current;
    if (t.kind !== 'punct' || t.text !== punct) {
      throw new GrammarError(`expected '${punct}'`, this.expectedAt());
    }
    this.i += 1;
  }

  takeInt(what: string): number {
    const t = this.current;
    if (t.kind !== 'num' || !INT_RE.test(t.text)) {
      throw new GrammarError(`expected integer ${what}`, this.expectedAt());
    }
    this.i += 1;
    return parseInt(t.text, 10);
  }

  takeNum(what: string): number {
    const t = this.current;
    if (t.kind !== 'num') {
      throw new GrammarError(`expected number ${what}`, this.expectedAt());
    }
    this.i += 1;
    return parseFloat(t.text);
  }

  takeQuoted(what: string): string {
    const t = this.current;
    if (t.kind !== 'quoted') {
      throw new GrammarError(`expected quoted ${what}`, this.expectedAt());
    }
    this.i += 1;
    return t.text;
  }

  takeId(): number {
    this.takeWord('id');
    this.takePunct('=');
    return this.takeInt('id');
  }
}

const SIZE_RE = /^(\d+)x(\d+)$/;

/** Check '<color> [shape] [WxH]' attribute text; purely lexical. */
export function checkAttributes(text: string): string | null {
  const parts = text.split(/\s+/).filter((p) => p.length > 0);
  if (parts.length === 0) {
    return 'empty attribute text';
  }
  let rest = parts.slice(1);
  if (rest.length > 0 && SHAPES.includes(rest[0])) {
    rest = rest.slice(1);
  }
  if (rest.length > 0) {
    if (!SIZE_RE.test(rest[0])) {
      return `unrecognized attribute token '${rest[0]}'`;
    }
    rest = rest.slice(1);
  }
  if (rest.length > 0) {
    return `unrecognized attribute token '${rest[0]}'`;
  }
  return null;
}

function parseCommand(text: string): ParsedCommand {
  const p = new Parser(text);
  const head = p.current;
  if (head.kind !== 'word' || !KEYWORDS.includes(head.text)) {
    throw new UnknownKeyword(`unknown command '${head.text}'`, head.offset);
  }
  p.i += 1;

  let kind = head.text as CommandKind | 'SET';
  let targetId: number | null = null;
  let velocity: [number, number] | null = null;
  let attributes: string | null = null;

  if (kind === 'REMOVE' || kind === 'FREEZE') {
    targetId = p.takeId();
  } else if (kind === 'REPLACE') {
    targetId = p.takeId();
    p.takeWord('WITH');
    attributes = p.takeQuoted('attribute text');
    const bad = checkAttributes(attributes);
    if (bad !== null) {
      throw new GrammarError(bad, 0);
    }
  } else if (kind === 'SET') {
    targetId = p.takeId();
    const sel = p.current;
    if (sel.kind === 'word' && sel.text === 'velocity') {
      p.i += 1;
      p.takePunct('=');
      p.takePunct('(');
      const vx = p.takeNum('velocity x');
      p.takePunct(',');
      const vy = p.takeNum('velocity y');
      p.takePunct(')');
      kind = 'SET_MOTION';
      velocity = [vx, vy];
    } else if (sel.kind === 'word' && sel.text === 'attributes') {
      p.i += 1;
      p.takePunct('=');
      attributes = p.takeQuoted('attribute text');
      const bad = checkAttributes(attributes);
      if (bad !== null) {
        throw new GrammarError(bad, 0);
      }
      kind = 'SET_ATTRIBUTE';
    } else {
      throw new GrammarError("expected 'velocity' or 'attributes'", p.expectedAt());
    }
  }

  let atFrame = 0;
  let duration: number | null = null;
  if (kind === 'NULL' && p.current.kind === 'end') {
    // bare NULL needs no suffix
  } else {
    p.takeWord('AT');
    p.takeWord('t');
    p.takePunct('=');
    atFrame = p.takeInt('frame');
    if (p.current.kind === 'word' && p.current.text === 'FOR') {
      if (kind !== 'FREEZE') {
        throw new GrammarError('FOR is only valid with FREEZE', p.current.offset);
      }
      p.i += 1;
      duration = p.takeInt('duration');
      if (duration < 1) {
        throw new GrammarError('FOR duration must be positive', p.expectedAt());
      }
    }
  }
  if (p.current.kind !== 'end') {
    throw new GrammarError(`unexpected trailing input '${p.current.text}'`, p.current.offset);
  }

  return {
    kind: kind as CommandKind,
    targetId,
    atFrame,
    duration,
    velocity,
    attributes,
  };
}

/**
 * Classify intervention text the way the service will: a parsed command,
 * a free-text query for the language backend, or a grammar error that
 * should block the request.
 */
export function checkIntervention(text: string): InterventionCheck {
  if (text.trim() === '') {
    return {
      outcome: 'command',
      command: {
        kind: 'NULL',
        targetId: null,
        atFrame: 0,
        duration: null,
        velocity: null,
        attributes: null,
      },
    };
  }
  try {
    return { outcome: 'command', command: parseCommand(text) };
  } catch (err) {
    if (err instanceof UnknownKeyword) {
      return { outcome: 'free-text' };
    }
    if (err instanceof GrammarError) {
      return { outcome: 'error', message: err.message, offset: err.offset };
    }
    throw err;
  }
}
