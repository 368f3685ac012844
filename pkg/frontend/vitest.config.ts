import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    environment: "node",
    // the e2e suite boots the annotation service and walks two full sessions
    testTimeout: 60_000,
    hookTimeout: 60_000,
  },
});
