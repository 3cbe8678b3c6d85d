#!/usr/bin/env node
// Runs the WebAssembly build of Z3 as a plain SMT-LIB2 solver over stdin/stdout,
// for environments without a native solver binary. Protocol-compatible with
// `z3 -in`: commands in, responses out, state persists across commands.
'use strict';

const path = require('path');
let initFn;
try {
  ({ init: initFn } = require('z3-solver'));
} catch (e) {
  ({ init: initFn } = require(path.join(__dirname, 'node_modules', 'z3-solver')));
}

function completePrefix(buf) {
  // Longest prefix of buf that is a sequence of complete commands.
  let depth = 0, inStr = false, inQuote = false, inComment = false, end = 0;
  for (let i = 0; i < buf.length; i++) {
    const c = buf[i];
    if (inComment) { if (c === '\n') inComment = false; continue; }
    if (inStr) { if (c === '"') inStr = false; continue; }
    if (inQuote) { if (c === '|') inQuote = false; continue; }
    if (c === ';') { inComment = true; continue; }
    if (c === '"') { inStr = true; continue; }
    if (c === '|') { inQuote = true; continue; }
    if (c === '(') depth++;
    else if (c === ')') { depth--; if (depth === 0) end = i + 1; }
  }
  return end;
}

(async () => {
  const { Z3 } = await initFn();
  const cfg = Z3.mk_config();
  let ctx = Z3.mk_context(cfg);
  let pending = '';
  let queue = Promise.resolve();

  process.stdin.setEncoding('utf8');
  process.stdin.on('data', (chunk) => {
    pending += chunk;
    const end = completePrefix(pending);
    if (end === 0) return;
    const batch = pending.slice(0, end);
    pending = pending.slice(end);
    queue = queue.then(async () => {
      if (/\(\s*reset\s*\)/.test(batch)) {
        // eval_smtlib2_string does not reliably clear context state on (reset);
        // rebuild the context instead and replay nothing.
        const parts = batch.split(/\(\s*reset\s*\)/);
        for (let i = 0; i < parts.length; i++) {
          const part = parts[i].trim();
          if (part.length > 0) {
            try { process.stdout.write(await Z3.eval_smtlib2_string(ctx, part)); }
            catch (e) { process.stdout.write(`(error "${String(e).replace(/"/g, "'")}")\n`); }
          }
          if (i + 1 < parts.length) {
            Z3.del_context(ctx);
            ctx = Z3.mk_context(cfg);
            process.stdout.write('success\n');
          }
        }
      } else {
        try { process.stdout.write(await Z3.eval_smtlib2_string(ctx, batch)); }
        catch (e) { process.stdout.write(`(error "${String(e).replace(/"/g, "'")}")\n`); }
      }
    });
  });
  process.stdin.on('end', () => { queue.then(() => process.exit(0)); });
})();
