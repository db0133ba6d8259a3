export * from "./types.js";
export * from "./api.js";
export * from "./sse.js";
export * from "./badges.js";
export * from "./diff.js";
export * from "./prelabel.js";
export * from "./authoring.js";
export * from "./report.js";
export * from "./watch.js";
