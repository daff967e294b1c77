import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    environment: "node",
    // The command-loop test boots the real HTTP service in a subprocess.
    testTimeout: 120_000,
    hookTimeout: 120_000,
  },
});
