import { defineConfig } from 'vitest/config';

export default defineConfig({
    test: {
        include: ['tests/**/*.test.ts'],
        // the end-to-end suite boots the real HTTP service
        testTimeout: 60000,
        hookTimeout: 120000,
    },
});
