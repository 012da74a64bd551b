import { existsSync } from "node:fs";
import { dirname, resolve } from "node:path";
import { defineConfig } from "vitest/config";

// src modules import each other as "./x.js" so the tsc output runs in a
// browser unmodified; this maps those specifiers back to the .ts sources
// when vitest executes them directly.
export default defineConfig({
  plugins: [
    {
      name: "ts-source-for-js-specifier",
      resolveId(source, importer) {
        if (importer && /^\.\.?\//.test(source) && source.endsWith(".js")) {
          const candidate = resolve(dirname(importer), source.slice(0, -3) + ".ts");
          if (existsSync(candidate)) return candidate;
        }
        return null;
      },
    },
  ],
  test: {
    include: ["tests/**/*.test.ts"],
    environment: "node",
  },
});
