import { defineConfig } from "vitest/config";

export default defineConfig({
  // served by the gateway at /, but keep asset URLs relative anyway
  base: "./",
  build: {
    outDir: "dist",
    target: "es2022",
    chunkSizeWarningLimit: 1200, // three.js in one chunk is fine here
  },
  test: {
    environment: "node",
    include: ["test/**/*.test.ts"],
  },
});
